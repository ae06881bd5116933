#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "kp/errors.hpp"

namespace kp {

struct LinearMap {
  Eigen::Index dimension = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;

  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const { return apply(v); }
};

LinearMap identity_map(Eigen::Index n);
// Multiplies by 1/d, with |d| < 1e-14 treated as 1.
LinearMap diagonal_inverse_map(const Eigen::VectorXd& diagonal);

struct GmresParams {
  double rel_tol = 1e-10;
  int max_iter = 500;
  int restart = 60;

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0;
  bool converged = false;
  // Relative residual after every inner iteration (entry 0 is the starting residual).
  std::vector<double> residual_history;
};

struct GmresResult {
  Eigen::VectorXd x;
  SolveReport report;
};

// Raised when max_iter is spent; `best` is the iterate with the smallest residual.
struct NoConvergence : GmresFailed {
  NoConvergence(Eigen::VectorXd best_x, SolveReport r);
  Eigen::VectorXd best;
  SolveReport report;
};

// Restarted GMRES on A x = b with right preconditioning A M^{-1} y = b, x = M^{-1} y,
// so the monitored residual is the true one. `x0` seeds the first cycle.
GmresResult gmres(const LinearMap& a, const LinearMap& precond_inv, const Eigen::VectorXd& b,
                  const GmresParams& params = {}, const Eigen::VectorXd* x0 = nullptr);

}  // namespace kp
