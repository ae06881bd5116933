#pragma once

#include <vector>

#include "kp/compact.hpp"
#include "kp/spectral.hpp"

namespace kp {

// For every non-negative x-mode k solves (cp_k I + cq_k D_y) x_k = r_k, where
// D_y = P^{-1} Q is a compact y operator; the banded matrix cp_k P + cq_k Q is
// factored once per mode. Modes with cq_k = 0 reduce to a scalar division.
class ModalYSolver {
 public:
  ModalYSolver() = default;
  ModalYSolver(const CompactOperator1D& d_y, const Eigen::VectorXcd& cp, const Eigen::VectorXcd& cq);

  Index modes() const { return static_cast<Index>(cp_.size()); }
  Index ny() const { return p_.rows(); }

  // rhs: ny x modes (column k belongs to mode k). Solved in place.
  void solve_inplace(RowMatrixXcd& rhs) const;

 private:
  SparseRowMatrix<Complex> p_;
  Eigen::VectorXcd cp_, cq_;
  std::vector<std::optional<BorderedLU<Complex>>> lu_;
};

// Eigenvalues of a periodic (circulant) 1D operator at modes 0 .. n/2, read off
// the transform of its first column.
template <class Op>
Eigen::VectorXcd circulant_symbol(const Op& op) {
  const Index n = op.size();
  RowMatrixXd e0 = RowMatrixXd::Zero(n, 1);
  e0(0, 0) = 1.0;
  const RowMatrixXd column = op.apply_columns(e0);
  return RowFft(n).forward(column.transpose()).row(0).transpose();
}

}  // namespace kp
