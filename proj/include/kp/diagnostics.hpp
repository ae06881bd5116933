#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "kp/stepper.hpp"

namespace kp {

// Uniform-weight quadrature (hx * hy per node).
double mass(const Field& f);
double l2_norm(const Field& f);
double linf_norm(const Field& f);
// max over y-lines of |sum_x u hx|
double max_xline_mass(const Field& f);

// Integral of u^{p+2}/((p+1)(p+2)) - u_x^2/2 + lambda (d_x^{-1} u_y)^2 / 2, with the
// derivatives taken by the stepper's own operators.
double energy(const Field& f, const ModelParams& model, const Stepper& ops);

using ExactSolution = std::function<double(double x, double y, double t)>;
double l2_error(const Field& f, const ExactSolution& exact, double t);

// Least-squares slope of log(err) against log(h); throws DegenerateSamples.
double convergence_order(const std::vector<std::pair<double, double>>& samples);

struct DiagnosticsRow {
  long step = 0;
  double time = 0;
  double mass = 0, l2 = 0, linf = 0, energy = 0, max_xline_mass = 0;
  int picard_iters = 0;
  int gmres_iters = 0;
};

DiagnosticsRow diagnostics_row(long step, double time, const Field& f, const Stepper& ops, const StepReport& report);

}  // namespace kp
