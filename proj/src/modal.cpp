#include "kp/modal.hpp"

namespace kp {

ModalYSolver::ModalYSolver(const CompactOperator1D& d_y, const Eigen::VectorXcd& cp, const Eigen::VectorXcd& cq)
    : p_(d_y.lhs().cast<Complex>()), cp_(cp), cq_(cq) {
  if (cp.size() != cq.size()) throw DimensionMismatch("modal solver: coefficient vectors differ in length");
  const SparseRowMatrix<Complex> q = d_y.rhs().cast<Complex>();
  // Periodic wrap entries reach half_width columns into the far corner.
  const Index border = d_y.bc() == BcKind::Periodic ? d_y.coefficients().half_width() : 0;
  lu_.resize(static_cast<std::size_t>(cp.size()));
  for (Index k = 0; k < cp.size(); ++k) {
    if (cq(k) == Complex(0)) {
      if (cp(k) == Complex(0)) throw SingularMatrix("modal solver: zero system at mode " + std::to_string(k));
      continue;
    }
    const SparseRowMatrix<Complex> m = cp(k) * p_ + cq(k) * q;
    lu_[static_cast<std::size_t>(k)].emplace(m, border);
  }
}

void ModalYSolver::solve_inplace(RowMatrixXcd& rhs) const {
  if (rhs.rows() != ny() || rhs.cols() != modes()) throw DimensionMismatch("modal solver: right-hand side shape");
  Vector<Complex> col(ny());
  for (Index k = 0; k < modes(); ++k) {
    const auto& lu = lu_[static_cast<std::size_t>(k)];
    if (!lu) {
      rhs.col(k) /= cp_(k);
      continue;
    }
    col = p_ * rhs.col(k);
    lu->solve_vector_inplace(col);
    rhs.col(k) = col;
  }
}

}  // namespace kp
