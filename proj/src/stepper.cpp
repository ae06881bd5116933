#include "kp/stepper.hpp"

#include <cmath>
#include <limits>

namespace kp {
namespace {

const Complex kI(0.0, 1.0);

Eigen::Map<const Eigen::VectorXd> as_vector(const RowMatrixXd& m) { return {m.data(), m.size()}; }

RowMatrixXcd apply_columns_complex(const CompactOperator1D& op, const RowMatrixXcd& a) {
  const RowMatrixXd re = op.apply_columns(a.real());
  const RowMatrixXd im = op.apply_columns(a.imag());
  RowMatrixXcd out(a.rows(), a.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

bool valid_order(int m) { return m == 2 || m == 4 || m == 6; }

}  // namespace

void ModelParams::validate() const {
  if (p < 1) throw InvalidArgument("model.p must be >= 1");
  if (std::abs(lambda) != 1.0) throw InvalidArgument("model.lambda must be -1 or +1");
}

std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::CompactFull: return "compact";
    case SchemeKind::SpectralFull: return "spectral";
    case SchemeKind::MixedSpectralCompact: return "mixed";
  }
  return "?";
}

std::string to_string(PreconditionerKind k) { return k == PreconditionerKind::Diagonal ? "diagonal" : "modal"; }

void SchemeConfig::validate(const Grid2D& g) const {
  g.validate();
  if (!(picard.tol > 0) || picard.max_iter < 1) throw InvalidArgument("picard tolerance and max_iter must be positive");
  gmres.validate();
  if (kind != SchemeKind::SpectralFull && !valid_order(order))
    throw UnsupportedOrder("compact order must be 2, 4 or 6, got " + std::to_string(order));
  switch (kind) {
    case SchemeKind::CompactFull:
      if (g.nx % 2 == 0) throw EvenGridSize("the compact antiderivative needs odd nx, got " + std::to_string(g.nx));
      break;
    case SchemeKind::SpectralFull:
      if (g.nx % 2 != 0 || g.ny % 2 != 0) throw UnsupportedModeCount("full spectral needs even nx and ny");
      if (g.bc_y != BcKind::Periodic) throw InvalidArgument("full spectral needs a periodic y boundary");
      break;
    case SchemeKind::MixedSpectralCompact:
      if (g.nx % 2 != 0) throw UnsupportedModeCount("the mixed scheme needs even nx");
      break;
  }
}

long TimeParams::steps() const {
  if (n_steps) return *n_steps;
  if (t_end) return std::lround(*t_end / dt);
  return 0;
}

void TimeParams::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!t_end && !n_steps) throw InvalidArgument("need t_end or n_steps");
  if (steps() < 0) throw InvalidArgument("negative run length");
}

RowMatrixXd picard_iterate(const RowMatrixXd& initial, const LinearSolve& linear_solve,
                           const NonlinearRhs& nonlinear_rhs, const PicardParams& params, StepReport& report) {
  RowMatrixXd v = initial;
  double previous = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int s = 1; s <= params.max_iter; ++s) {
    RowMatrixXd next = linear_solve(nonlinear_rhs(v), v);
    report.picard_iters = s;
    if (!next.allFinite()) throw PicardDiverged("non-finite Picard iterate at iteration " + std::to_string(s));
    const double delta = (next - v).norm() / std::max(v.norm(), 1.0);
    report.last_picard_delta = delta;
    v = std::move(next);
    if (delta < params.tol) return v;
    growing = delta > previous ? growing + 1 : 0;
    if (growing >= 3)
      throw PicardDiverged("Picard update grew three times in a row (delta " + std::to_string(delta) + ")");
    previous = delta;
  }
  throw PicardDiverged("Picard iteration did not reach " + std::to_string(params.tol) + " in " +
                       std::to_string(params.max_iter) + " iterations (delta " +
                       std::to_string(report.last_picard_delta) + ")");
}

Stepper::Stepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme, double dt)
    : grid_(g), model_(model), scheme_(scheme), dt_(dt) {
  model.validate();
  scheme.validate(g);
  if (!(dt > 0)) throw InvalidArgument("dt must be positive");
}

StepReport Stepper::step(Field& u) const {
  if (!(u.grid == grid_)) throw DimensionMismatch("field grid differs from the stepper grid");
  StepReport report;
  u.values = advance(u.values, report);
  return report;
}

RowMatrixXd Stepper::midpoint_power(const RowMatrixXd& un, const RowMatrixXd& v) const {
  const Eigen::ArrayXXd mid = 0.5 * (un.array() + v.array());
  Eigen::ArrayXXd out = mid;
  for (int i = 0; i < model_.p; ++i) out *= mid;
  return out.matrix();
}

// ---------------------------------------------------------------- compact

CompactStepper::CompactStepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme, double dt)
    : Stepper(g, model, scheme, dt), ops_(g, scheme.order) {
  a_ = cn_map(ops_, model.lambda, dt);
  if (scheme.preconditioner == PreconditionerKind::Modal) {
    modal_ = std::make_unique<CompactModalPreconditioner>(ops_, model.lambda, dt);
    precond_ = modal_->as_map();
  } else {
    precond_ = diagonal_inverse_map(cn_diagonal(ops_, model.lambda, dt));
  }
}

RowMatrixXd CompactStepper::advance(const RowMatrixXd& un, StepReport& report) const {
  const double lambda = model_.lambda;
  const RowMatrixXd explicit_part = un - (0.5 * dt_) * linear_part(ops_, lambda, un);
  const double weight = dt_ / (model_.p + 1);
  const Index nx = grid_.nx, ny = grid_.ny;

  auto nonlinear = [&](const RowMatrixXd& v) { return midpoint_power(un, v); };
  auto solve = [&](const RowMatrixXd& n, const RowMatrixXd& guess) -> RowMatrixXd {
    const RowMatrixXd rhs = explicit_part - weight * ops_.dx.apply_rows(n);
    const Eigen::VectorXd x0 = as_vector(guess);
    GmresResult res;
    try {
      res = gmres(a_, precond_, as_vector(rhs), scheme_.gmres, &x0);
    } catch (const NoConvergence& e) {
      report.gmres_total_iters += e.report.iterations;
      throw GmresFailed(e.what());
    }
    report.gmres_total_iters += res.report.iterations;
    report.max_gmres_residual = std::max(report.max_gmres_residual, res.report.final_relative_residual);
    RowMatrixXd x = Eigen::Map<const RowMatrixXd>(res.x.data(), ny, nx);
    // A keeps every x-line sum, so the line means of the solution are those of the rhs.
    x.colwise() += rhs.rowwise().mean() - x.rowwise().mean();
    return x;
  };
  return picard_iterate(un, solve, nonlinear, scheme_.picard, report);
}

RowMatrixXd CompactStepper::x_derivative(const RowMatrixXd& u) const { return ops_.dx.apply_rows(u); }

RowMatrixXd CompactStepper::antiderivative_of_y_derivative(const RowMatrixXd& u) const {
  return ops_.anti.apply_rows(ops_.dy.apply_columns(u));
}

// --------------------------------------------------------------- spectral

SpectralStepper::SpectralStepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme, double dt)
    : Stepper(g, model, scheme, dt),
      fft_(g.nx, g.ny),
      dx_(g.nx, 2 * g.lx, 1),
      dy_(g.ny, 2 * g.ly, 1),
      anti_(g.nx, 2 * g.lx, -1) {
  const WavenumberGrid& kx = dx_.grid();
  const WavenumberGrid& ky = dy_.grid();
  const Index modes = g.nx / 2 + 1;
  propagator_.resize(g.ny, modes);
  forcing_.resize(g.ny, modes);
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < modes; ++i) {
      Complex s = 0.0, force = 0.0;
      // The zero x-mode carries the line means and is left out of the dynamics.
      if (i != 0 && !kx.is_nyquist(i)) {
        const double k = kx.values(i), l = ky.values(j);
        s = kI * (k * k * k - model.lambda * l * l / k);
        force = kI * k / static_cast<double>(model.p + 1);
      }
      const Complex minus_inv = 1.0 / (1.0 - 0.5 * dt * s);
      propagator_(j, i) = (1.0 + 0.5 * dt * s) * minus_inv;
      forcing_(j, i) = -dt * force * minus_inv;
    }
}

RowMatrixXd SpectralStepper::advance(const RowMatrixXd& un, StepReport& report) const {
  const RowMatrixXcd free_part = propagator_.cwiseProduct(fft_.forward(un));
  auto nonlinear = [&](const RowMatrixXd& v) { return midpoint_power(un, v); };
  auto solve = [&](const RowMatrixXd& n, const RowMatrixXd&) -> RowMatrixXd {
    RowMatrixXcd n_hat = fft_.forward(n);
    if (scheme_.dealias) dealias_two_thirds(n_hat, grid_.nx, grid_.ny);
    return fft_.backward(free_part + forcing_.cwiseProduct(n_hat));
  };
  return picard_iterate(un, solve, nonlinear, scheme_.picard, report);
}

RowMatrixXd SpectralStepper::x_derivative(const RowMatrixXd& u) const { return dx_.apply_rows(u); }

RowMatrixXd SpectralStepper::antiderivative_of_y_derivative(const RowMatrixXd& u) const {
  return anti_.apply_rows(dy_.apply_columns(u));
}

// ------------------------------------------------------------------ mixed

MixedStepper::MixedStepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme, double dt)
    : Stepper(g, model, scheme, dt),
      fft_(g.nx),
      dx_(g.nx, 2 * g.lx, 1),
      anti_(g.nx, 2 * g.lx, -1),
      dy_(g.ny, g.hy(), 1, scheme.order, g.bc_y),
      dyy_(g.ny, g.hy(), 2, scheme.order, g.bc_y) {
  const WavenumberGrid& kx = dx_.grid();
  const Index modes = fft_.modes();
  sigma3_.resize(modes);
  tau_.resize(modes);
  nonlinear_.resize(modes);
  for (Index i = 0; i < modes; ++i) {
    const bool active = i != 0 && !kx.is_nyquist(i);
    const double k = kx.values(i);
    sigma3_(i) = active ? -kI * k * k * k : 0.0;  // (ik)^3
    tau_(i) = active ? -kI / k : 0.0;             // 1/(ik)
    nonlinear_(i) = active ? kI * k / static_cast<double>(model.p + 1) : 0.0;
  }
  const Eigen::VectorXcd cp = (1.0 + 0.5 * dt * sigma3_.array()).matrix();
  const Eigen::VectorXcd cq = (0.5 * dt * model.lambda) * tau_;
  solver_ = ModalYSolver(dyy_, cp, cq);
}

RowMatrixXd MixedStepper::advance(const RowMatrixXd& un, StepReport& report) const {
  const RowMatrixXcd u_hat = fft_.forward(un);
  const RowMatrixXcd dyy_hat = apply_columns_complex(dyy_, u_hat);
  const double h = 0.5 * dt_;
  const RowMatrixXcd explicit_part =
      u_hat * (1.0 - h * sigma3_.array()).matrix().asDiagonal() -
      dyy_hat * (h * model_.lambda * tau_).asDiagonal();
  const Eigen::VectorXcd force = -dt_ * nonlinear_;

  auto nonlinear = [&](const RowMatrixXd& v) { return midpoint_power(un, v); };
  auto solve = [&](const RowMatrixXd& n, const RowMatrixXd&) -> RowMatrixXd {
    RowMatrixXcd n_hat = fft_.forward(n);
    if (scheme_.dealias)
      for (Index i = 0; i < n_hat.cols(); ++i)
        if (3 * i > grid_.nx) n_hat.col(i).setZero();
    RowMatrixXcd rhs = explicit_part + n_hat * force.asDiagonal();
    solver_.solve_inplace(rhs);
    return fft_.backward(rhs);
  };
  return picard_iterate(un, solve, nonlinear, scheme_.picard, report);
}

RowMatrixXd MixedStepper::x_derivative(const RowMatrixXd& u) const { return dx_.apply_rows(u); }

RowMatrixXd MixedStepper::antiderivative_of_y_derivative(const RowMatrixXd& u) const {
  return anti_.apply_rows(dy_.apply_columns(u));
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Stepper> make_stepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme,
                                      double dt) {
  switch (scheme.kind) {
    case SchemeKind::CompactFull: return std::make_unique<CompactStepper>(g, model, scheme, dt);
    case SchemeKind::SpectralFull: return std::make_unique<SpectralStepper>(g, model, scheme, dt);
    case SchemeKind::MixedSpectralCompact: return std::make_unique<MixedStepper>(g, model, scheme, dt);
  }
  throw InvalidArgument("unknown scheme kind");
}

namespace {
std::pair<Field, StepReport> one_step(const Field& un, const ModelParams& model, SchemeConfig scheme, double dt,
                                      SchemeKind kind) {
  scheme.kind = kind;
  const auto stepper = make_stepper(un.grid, model, scheme, dt);
  Field next = un;
  const StepReport report = stepper->step(next);
  return {std::move(next), report};
}
}  // namespace

std::pair<Field, StepReport> step_compact(const Field& un, const ModelParams& model, const SchemeConfig& scheme,
                                          double dt) {
  return one_step(un, model, scheme, dt, SchemeKind::CompactFull);
}

std::pair<Field, StepReport> step_spectral(const Field& un, const ModelParams& model, const SchemeConfig& scheme,
                                           double dt) {
  return one_step(un, model, scheme, dt, SchemeKind::SpectralFull);
}

std::pair<Field, StepReport> step_mixed(const Field& un, const ModelParams& model, const SchemeConfig& scheme,
                                        double dt) {
  return one_step(un, model, scheme, dt, SchemeKind::MixedSpectralCompact);
}

}  // namespace kp
