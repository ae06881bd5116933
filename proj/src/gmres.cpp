#include "kp/gmres.hpp"

#include <cmath>
#include <string>

namespace kp {

using Eigen::Index;

LinearMap identity_map(Index n) {
  return {n, [](const Eigen::VectorXd& v) { return v; }};
}

LinearMap diagonal_inverse_map(const Eigen::VectorXd& diagonal) {
  Eigen::VectorXd inv = diagonal;
  for (Index i = 0; i < inv.size(); ++i) inv(i) = std::abs(inv(i)) < 1e-14 ? 1.0 : 1.0 / inv(i);
  return {inv.size(), [inv](const Eigen::VectorXd& v) -> Eigen::VectorXd { return inv.cwiseProduct(v); }};
}

void GmresParams::validate() const {
  if (!(rel_tol > 0)) throw InvalidArgument("gmres rel_tol must be positive");
  if (restart < 1) throw InvalidArgument("gmres restart must be at least 1");
  if (max_iter < 1) throw InvalidArgument("gmres max_iter must be at least 1");
}

NoConvergence::NoConvergence(Eigen::VectorXd best_x, SolveReport r)
    : GmresFailed("gmres: no convergence after " + std::to_string(r.iterations) +
                  " iterations, relative residual " + std::to_string(r.final_relative_residual)),
      best(std::move(best_x)),
      report(std::move(r)) {}

GmresResult gmres(const LinearMap& a, const LinearMap& precond_inv, const Eigen::VectorXd& b,
                  const GmresParams& params, const Eigen::VectorXd* x0) {
  params.validate();
  const Index n = b.size();
  if (a.dimension != n || precond_inv.dimension != n || (x0 && x0->size() != n))
    throw DimensionMismatch("gmres: operator, preconditioner and right-hand side sizes differ");

  GmresResult out;
  SolveReport& rep = out.report;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x = Eigen::VectorXd::Zero(n);
    rep.converged = true;
    rep.residual_history = {0.0};
    return out;
  }

  Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
  const int m = params.restart;
  Eigen::MatrixXd v(n, m + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  Eigen::VectorXd best = x;
  double best_rel = INFINITY;

  while (true) {
    const Eigen::VectorXd r = b - a(x);
    const double beta = r.norm();
    const double rel = beta / bnorm;
    if (rel < best_rel) best_rel = rel, best = x;
    if (rep.residual_history.empty()) rep.residual_history.push_back(rel);
    rep.final_relative_residual = rel;
    if (rel <= params.rel_tol) {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= params.max_iter) break;

    v.col(0) = r / beta;
    g.setZero();
    g(0) = beta;
    h.setZero();
    int k = 0;
    while (k < m && rep.iterations < params.max_iter) {
      Eigen::VectorXd w = a(precond_inv(v.col(k)));
      ++rep.iterations;
      // Modified Gram-Schmidt with one reorthogonalization pass.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          const double hij = v.col(i).dot(w);
          h(i, k) += hij;
          w -= hij * v.col(i);
        }
      const double hnext = w.norm();
      h(k + 1, k) = hnext;
      for (int i = 0; i < k; ++i) {
        const double t = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
        h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
        h(i, k) = t;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      if (denom == 0.0) throw GmresFailed("gmres: breakdown with a singular Hessenberg column");
      cs(k) = h(k, k) / denom;
      sn(k) = h(k + 1, k) / denom;
      h(k, k) = denom;
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);
      ++k;
      const double est = std::abs(g(k)) / bnorm;
      rep.residual_history.push_back(est);
      if (hnext == 0.0 || est <= params.rel_tol) break;  // hnext == 0: exact solution in the space
      v.col(k) = w / hnext;
    }
    const Eigen::VectorXd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    x += precond_inv(v.leftCols(k) * y);
  }

  if (!rep.converged) throw NoConvergence(best, rep);
  out.x = std::move(x);
  return out;
}

}  // namespace kp
