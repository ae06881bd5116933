#include "kp/analytic.hpp"

#include <cmath>

namespace kp {
namespace {

double require(const ParamMap& m, const std::string& state, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw MissingParam(state + " needs parameter '" + key + "'");
  return it->second;
}

double get_or(const ParamMap& m, const std::string& key, double fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

ZaitsevParams zaitsev_from(const ParamMap& m, const std::string& state) {
  ZaitsevParams z = zaitsev_params(require(m, state, "alpha"), require(m, state, "delta"));
  if (const auto it = m.find("beta"); it != m.end()) z = override_beta(z, it->second);
  return z;
}

}  // namespace

ZaitsevParams zaitsev_params(double alpha, double delta) {
  if (!(alpha > 0) || !(delta > 0)) throw InvalidArgument("zaitsev alpha and delta must be positive");
  const double a4 = alpha * alpha * alpha * alpha;
  if (3 * a4 >= delta * delta)
    throw ExistenceViolated("zaitsev wave needs 3 alpha^4 < delta^2 (alpha=" + std::to_string(alpha) +
                            ", delta=" + std::to_string(delta) + ")");
  ZaitsevParams z;
  z.alpha = alpha;
  z.delta = delta;
  z.beta = std::sqrt((delta * delta - 3 * a4) / (delta * delta));
  z.omega = (delta * delta + a4) / alpha;
  z.c = z.omega / alpha;
  return z;
}

ZaitsevParams override_beta(ZaitsevParams p, double beta) {
  if (!(std::abs(beta) < 1)) throw InvalidArgument("zaitsev beta must lie in (-1, 1)");
  p.beta_overridden = beta != p.beta;
  p.beta = beta;
  return p;
}

double zaitsev(const ZaitsevParams& p, double x, double y, double t) {
  // Divided through by cosh so that large |alpha x| cannot overflow.
  const double s = 1.0 / std::cosh(p.alpha * x - p.omega * t);
  const double bc = p.beta * std::cos(p.delta * y);
  const double den = 1.0 - bc * s;
  return 12 * p.alpha * p.alpha * s * (s - bc) / (den * den);
}

double LineSolitonParams::amplitude() const { return std::pow((p + 1) * (p + 2) * c / 2, 1.0 / p); }

double line_soliton(const LineSolitonParams& params, double x, double t) {
  const double arg = params.p * std::sqrt(params.c) / 2 * (x - params.c * t);
  return params.amplitude() * std::pow(1.0 / std::cosh(arg), 2.0 / params.p);
}

std::vector<std::string> initial_state_names() {
  return {"zero", "zaitsev", "gaussian-packet", "perturbed-zaitsev", "perturbed-line", "gaussian-xx"};
}

Field initial_state(const std::string& name, const Grid2D& g, const ParamMap& params) {
  if (name == "zero") return Field(g);
  if (name == "zaitsev") {
    const ZaitsevParams z = zaitsev_from(params, name);
    return Field::sample(g, [&](double x, double y) { return zaitsev(z, x, y, 0.0); });
  }
  if (name == "gaussian-packet") {
    const double a = get_or(params, "amplitude", 5.0);
    const double wx = get_or(params, "wx", 0.25);
    const double wy = get_or(params, "wy", 7.5);
    return Field::sample(g, [=](double x, double y) {
      return a * (1 - 2 * wx * x * x) * std::exp(-wx * x * x - wy * y * y);
    });
  }
  if (name == "perturbed-zaitsev") {
    const ZaitsevParams z = zaitsev_from(params, name);
    const double a = get_or(params, "amplitude", 6.0);
    const double shift = g.lx / 2;
    return Field::sample(g, [&](double x, double y) {
      const double xs = x + shift;
      return zaitsev(z, xs, y, 0.0) + a * xs * std::exp(-xs * xs - y * y);
    });
  }
  if (name == "perturbed-line") {
    const LineSolitonParams line{static_cast<int>(get_or(params, "p", 1)), get_or(params, "c", 4.0)};
    if (line.p < 1 || !(line.c > 0)) throw InvalidArgument("perturbed-line needs p >= 1 and c > 0");
    const double eps = get_or(params, "epsilon", 0.4);
    return Field::sample(g, [&](double x, double y) { return line_soliton(line, x + eps * std::cos(2 * y / g.ly), 0); });
  }
  if (name == "gaussian-xx") {
    const double pre = get_or(params, "prefactor", 3.0);
    return Field::sample(g, [=](double x, double y) { return pre * (4 * x * x - 2) * std::exp(-(x * x + y * y)); });
  }
  throw UnknownState("unknown initial state '" + name + "'");
}

void validate_initial_state(const std::string& name, const ParamMap& params) {
  initial_state(name, Grid2D{1, 1, 1, 1}, params);
}

}  // namespace kp
