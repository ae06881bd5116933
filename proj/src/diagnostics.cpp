#include "kp/diagnostics.hpp"

#include <cmath>

namespace kp {

double mass(const Field& f) { return f.values.sum() * f.grid.cell_area(); }

double l2_norm(const Field& f) { return std::sqrt(f.values.squaredNorm() * f.grid.cell_area()); }

double linf_norm(const Field& f) { return f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0; }

double max_xline_mass(const Field& f) {
  return f.values.size() ? (f.values.rowwise().sum() * f.grid.hx()).cwiseAbs().maxCoeff() : 0.0;
}

double energy(const Field& f, const ModelParams& model, const Stepper& ops) {
  const int p = model.p;
  const Eigen::ArrayXXd u = f.values.array();
  Eigen::ArrayXXd up2 = u * u;
  for (int i = 0; i < p; ++i) up2 *= u;
  const Eigen::ArrayXXd ux = ops.x_derivative(f.values).array();
  const Eigen::ArrayXXd w = ops.antiderivative_of_y_derivative(f.values).array();
  const Eigen::ArrayXXd density =
      up2 / static_cast<double>((p + 1) * (p + 2)) - ux.square() / 2 + model.lambda * w.square() / 2;
  return density.sum() * f.grid.cell_area();
}

double l2_error(const Field& f, const ExactSolution& exact, double t) {
  double s = 0;
  for (Index j = 0; j < f.grid.ny; ++j)
    for (Index i = 0; i < f.grid.nx; ++i) {
      const double d = f.values(j, i) - exact(f.grid.x(i), f.grid.y(j), t);
      s += d * d;
    }
  return std::sqrt(s * f.grid.cell_area());
}

double convergence_order(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) throw DegenerateSamples("need at least two (h, err) samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [h, e] : samples) {
    if (!(h > 0) || !(e > 0)) throw DegenerateSamples("samples must be positive");
    const double x = std::log(h), y = std::log(e);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = static_cast<double>(samples.size());
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 1e-300)) throw DegenerateSamples("all samples share one h");
  return (n * sxy - sx * sy) / den;
}

DiagnosticsRow diagnostics_row(long step, double time, const Field& f, const Stepper& ops, const StepReport& report) {
  DiagnosticsRow r;
  r.step = step;
  r.time = time;
  r.mass = mass(f);
  r.l2 = l2_norm(f);
  r.linf = linf_norm(f);
  r.energy = energy(f, ops.model(), ops);
  r.max_xline_mass = max_xline_mass(f);
  r.picard_iters = report.picard_iters;
  r.gmres_iters = report.gmres_total_iters;
  return r;
}

}  // namespace kp
