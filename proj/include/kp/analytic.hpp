#pragma once

#include <map>
#include <string>
#include <vector>

#include "kp/field.hpp"

namespace kp {

// Zaitsev travelling wave of KP-I (p = 1):
//   Psi = 12 a^2 (1 - b cosh(a x - w t) cos(d y)) / (cosh(a x - w t) - b cos(d y))^2
// with b = sqrt((d^2 - 3 a^4) / d^2), w = (d^2 + a^4) / a and speed c = w / a.
struct ZaitsevParams {
  double alpha = 0, delta = 0;
  double beta = 0, omega = 0, c = 0;
  bool beta_overridden = false;  // beta no longer follows (alpha, delta); Psi is then not a solution
};

ZaitsevParams zaitsev_params(double alpha, double delta);
ZaitsevParams override_beta(ZaitsevParams p, double beta);
double zaitsev(const ZaitsevParams& p, double x, double y, double t);

// KdV soliton ((p+1)(p+2)c/2)^{1/p} sech^{2/p}(p sqrt(c) / 2 (x - c t)).
struct LineSolitonParams {
  int p = 1;
  double c = 1;
  double amplitude() const;
};
double line_soliton(const LineSolitonParams& params, double x, double t);

using ParamMap = std::map<std::string, double>;

// Named initial data. Recognised names and parameters (defaults in brackets):
//   zero
//   zaitsev            alpha, delta, beta [derived]
//   gaussian-packet    amplitude [5], wx [0.25], wy [7.5]:  A (1 - 2 wx x^2) exp(-wx x^2 - wy y^2)
//   perturbed-zaitsev  alpha, delta, beta [derived], amplitude [6]:
//                      Psi(x + lx/2, y, 0) + A (x + lx/2) exp(-(x + lx/2)^2 - y^2)
//   perturbed-line     p [1], c [4], epsilon [0.4]:  line soliton at x + epsilon cos(2 y / ly)
//   gaussian-xx        prefactor [3]:  prefactor * d_xx exp(-(x^2 + y^2))
// Throws UnknownState or MissingParam.
Field initial_state(const std::string& name, const Grid2D& g, const ParamMap& params);
std::vector<std::string> initial_state_names();
// Same checks as initial_state without sampling a grid.
void validate_initial_state(const std::string& name, const ParamMap& params);

}  // namespace kp
