#pragma once

#include <vector>

#include "kp/banded.hpp"
#include "kp/rational.hpp"

namespace kp {

// Boundary treatment of a 1D compact operator.
//   Periodic    circulant stencil with wrap-around corners
//   OneSided    first/last rows replaced by one-sided closures (first derivative only)
//   Dirichlet0  odd mirror about the outer cell faces (ghost f_{-1-j} = -f_j)
//   Neumann0    even mirror about the outer cell faces (ghost f_{-1-j} = +f_j)
enum class BcKind { Periodic, OneSided, Dirichlet0, Neumann0 };

// Symmetric compact stencil
//   alpha (f^(k)_{i-1} + f^(k)_{i+1}) + f^(k)_i = (a * A_i + b * B_i) / h^k
// where A_i, B_i are the inner and outer difference groups for derivative k:
//   k = 1: A = (f_{i+1} - f_{i-1}) / 2,              B = (f_{i+2} - f_{i-2}) / 4
//   k = 2: A = f_{i+1} - 2 f_i + f_{i-1},            B = (f_{i+2} - 2 f_i + f_{i-2}) / 4
//   k = 3: A = (f_{i+2} - f_{i-2} - 2 (f_{i+1} - f_{i-1})) / 2
//          B = (f_{i+3} - f_{i-3} - 3 (f_{i+1} - f_{i-1})) / 8
struct CoefficientSet {
  int derivative_order = 1;
  int accuracy_order = 2;
  Rational alpha, a, b;

  // Reach of the right-hand side stencil.
  int half_width() const;
  // Right-hand side weights for offsets -half_width() .. half_width(), in units of 1/h^k.
  std::vector<Rational> stencil() const;
};

// Unique coefficients satisfying the Taylor order conditions for the pair.
// Under-determined families (order 2 and 4) are closed with b = 0, falling
// back to alpha = 0 if b = 0 would leave |alpha| >= 1/2; order 2 uses
// alpha = b = 0. Throws UnsupportedOrder outside {1,2,3} x {2,4,6}.
CoefficientSet interior_coefficients(int derivative_order, int accuracy_order);

enum class EdgePosition { LeftEdge, RightEdge };

// One-sided first-derivative closure at an edge node e:
//   f'_e + alpha f'_{e+s} = (s / h) sum_j rhs_coeffs[j] f_{e + s j},   s = +1 left, -1 right.
// lhs_coeffs = {1, alpha}.
struct BoundaryClosure {
  EdgePosition position = EdgePosition::LeftEdge;
  std::vector<Rational> lhs_coeffs;
  std::vector<Rational> rhs_coeffs;
  int accuracy_order = 1;
};

// Solves the Taylor moment system (monomials 1 .. x^accuracy_order exact at the
// edge node). With stencil_points == accuracy_order the LHS neighbour weight is
// an unknown; with more points the closure is explicit and uses only the
// nearest accuracy_order + 1 points.
BoundaryClosure boundary_closure(int derivative_order, int accuracy_order, int stencil_points,
                                 EdgePosition position = EdgePosition::LeftEdge);

// P F^(k) = Q F on a uniform grid of spacing h. P is factored once.
class CompactOperator1D {
 public:
  CompactOperator1D() = default;
  CompactOperator1D(Index n_points, double h, int derivative_order, int accuracy_order, BcKind bc);

  Index size() const { return n_; }
  double spacing() const { return h_; }
  int derivative_order() const { return coeffs_.derivative_order; }
  int accuracy_order() const { return coeffs_.accuracy_order; }
  BcKind bc() const { return bc_; }
  const CoefficientSet& coefficients() const { return coeffs_; }
  const SparseMatrixXd& lhs() const { return p_; }
  const SparseMatrixXd& rhs() const { return q_; }

  // Applies the operator to every column of `columns` (n x m).
  RowMatrixXd apply_columns(const Eigen::Ref<const RowMatrixXd>& columns) const;
  // Applies the operator to every row of `rows` (m x n).
  RowMatrixXd apply_rows(const Eigen::Ref<const RowMatrixXd>& rows) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

 private:
  Index n_ = 0;
  double h_ = 0;
  BcKind bc_ = BcKind::Periodic;
  CoefficientSet coeffs_;
  SparseMatrixXd p_, q_;
  BorderedLU<double> p_lu_;
};

CompactOperator1D build_operator(Index n_points, double h, int derivative_order, int accuracy_order, BcKind bc);
Eigen::VectorXd apply(const CompactOperator1D& op, const Eigen::VectorXd& f);

// Row-replaced pair of a periodic first-derivative operator: the last rows of
// P and Q become all ones (closure sum F = 0, sum F' = 0).
struct ClosedPair {
  SparseMatrixXd p_bar, q_bar;
};
ClosedPair closed_pair(const CompactOperator1D& first_derivative);

// Mass-zero antiderivative F = Qbar^{-1} Pbar F' on a periodic grid of odd size.
// The input is projected onto zero mean first, so every output sums to zero.
class AntiderivativeOperator1D {
 public:
  AntiderivativeOperator1D() = default;
  AntiderivativeOperator1D(Index n_points, double h, int accuracy_order);

  Index size() const { return n_; }
  double spacing() const { return h_; }
  int accuracy_order() const { return order_; }
  const SparseMatrixXd& p_bar() const { return pair_.p_bar; }
  const SparseMatrixXd& q_bar() const { return pair_.q_bar; }

  RowMatrixXd apply_columns(const Eigen::Ref<const RowMatrixXd>& columns) const;
  RowMatrixXd apply_rows(const Eigen::Ref<const RowMatrixXd>& rows) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

 private:
  Index n_ = 0;
  double h_ = 0;
  int order_ = 2;
  ClosedPair pair_;
  BorderedLU<double> q_lu_;
};

AntiderivativeOperator1D build_antiderivative(Index n_points, double h, int accuracy_order);
Eigen::VectorXd apply_antiderivative(const AntiderivativeOperator1D& op, const Eigen::VectorXd& f);

// Explicit matrix of any 1D operator (columns of the identity pushed through it).
template <class Op>
Eigen::MatrixXd dense_matrix(const Op& op) {
  const RowMatrixXd id = RowMatrixXd::Identity(op.size(), op.size());
  return op.apply_columns(id);
}

// Identity in the same operator protocol, for Kronecker factors.
struct Identity1D {
  Index n = 0;
  Index size() const { return n; }
  RowMatrixXd apply_columns(const Eigen::Ref<const RowMatrixXd>& c) const { return c; }
  RowMatrixXd apply_rows(const Eigen::Ref<const RowMatrixXd>& r) const { return r; }
};

}  // namespace kp
