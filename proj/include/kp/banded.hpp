#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "kp/errors.hpp"

namespace kp {

using Eigen::Index;

template <class Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using SparseRowMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

using RowMatrixXd = RowMatrix<double>;
using SparseMatrixXd = SparseRowMatrix<double>;

// Relative pivot threshold below which a factorization reports SingularMatrix.
inline constexpr double kPivotTolerance = 1e-14;

template <class Scalar>
typename Eigen::NumTraits<Scalar>::Real max_abs_entry(const SparseRowMatrix<Scalar>& a) {
  typename Eigen::NumTraits<Scalar>::Real m = 0;
  for (Index r = 0; r < a.outerSize(); ++r)
    for (typename SparseRowMatrix<Scalar>::InnerIterator it(a, r); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// LU factorization with partial pivoting of a band matrix (kl sub-, ku
// super-diagonals). Row interchanges widen U to kl + ku super-diagonals, as in
// LAPACK's gbtrf.
template <class Scalar>
class BandedLU {
 public:
  using Real = typename Eigen::NumTraits<Scalar>::Real;

  BandedLU() = default;

  explicit BandedLU(const SparseRowMatrix<Scalar>& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("banded_lu: matrix is not square");
    n_ = a.rows();
    for (Index r = 0; r < n_; ++r)
      for (typename SparseRowMatrix<Scalar>::InnerIterator it(a, r); it; ++it) {
        kl_ = std::max(kl_, r - it.col());
        ku_ = std::max(ku_, it.col() - r);
      }
    width_ = 2 * kl_ + ku_ + 1;
    work_.assign(static_cast<std::size_t>(n_ * width_), Scalar(0));
    mult_.assign(static_cast<std::size_t>(n_ * std::max<Index>(kl_, 1)), Scalar(0));
    piv_.resize(static_cast<std::size_t>(n_));
    for (Index r = 0; r < n_; ++r)
      for (typename SparseRowMatrix<Scalar>::InnerIterator it(a, r); it; ++it) at(r, it.col()) = it.value();
    factor(max_abs_entry(a));
  }

  Index size() const { return n_; }
  Index lower_bandwidth() const { return kl_; }
  Index upper_bandwidth() const { return ku_; }

  // Solves in place for every column of x (n × m, rows contiguous).
  void solve_inplace(RowMatrix<Scalar>& x) const {
    check_rows(x.rows());
    for (Index i = 0; i < n_; ++i) {
      const Index p = piv_[static_cast<std::size_t>(i)];
      if (p != i) x.row(i).swap(x.row(p));
      const Index last = std::min(n_ - 1, i + kl_);
      for (Index r = i + 1; r <= last; ++r) x.row(r) -= mult(i, r) * x.row(i);
    }
    for (Index i = n_ - 1; i >= 0; --i) {
      const Index last = std::min(n_ - 1, i + kl_ + ku_);
      for (Index c = i + 1; c <= last; ++c) x.row(i) -= at(i, c) * x.row(c);
      x.row(i) *= inv_diag_[static_cast<std::size_t>(i)];
    }
  }

  // Single right-hand side given as a contiguous or strided Eigen vector.
  template <class Vec>
  void solve_vector_inplace(Vec&& x) const {
    check_rows(x.size());
    for (Index i = 0; i < n_; ++i) {
      const Index p = piv_[static_cast<std::size_t>(i)];
      if (p != i) std::swap(x(i), x(p));
      const Index last = std::min(n_ - 1, i + kl_);
      const Scalar xi = x(i);
      for (Index r = i + 1; r <= last; ++r) x(r) -= mult(i, r) * xi;
    }
    for (Index i = n_ - 1; i >= 0; --i) {
      const Index last = std::min(n_ - 1, i + kl_ + ku_);
      Scalar s = x(i);
      for (Index c = i + 1; c <= last; ++c) s -= at(i, c) * x(c);
      x(i) = s * inv_diag_[static_cast<std::size_t>(i)];
    }
  }

 private:
  Scalar& at(Index r, Index c) { return work_[static_cast<std::size_t>(r * width_ + (c - r + kl_))]; }
  const Scalar& at(Index r, Index c) const { return work_[static_cast<std::size_t>(r * width_ + (c - r + kl_))]; }
  Scalar& mult(Index i, Index r) { return mult_[static_cast<std::size_t>(i * std::max<Index>(kl_, 1) + (r - i - 1))]; }
  const Scalar& mult(Index i, Index r) const {
    return mult_[static_cast<std::size_t>(i * std::max<Index>(kl_, 1) + (r - i - 1))];
  }
  void check_rows(Index rows) const {
    if (rows != n_) throw DimensionMismatch("banded_solve: right-hand side has wrong length");
  }

  void factor(Real scale) {
    const Real tol = kPivotTolerance * (scale > 0 ? scale : Real(1));
    inv_diag_.resize(static_cast<std::size_t>(n_));
    for (Index i = 0; i < n_; ++i) {
      const Index last_row = std::min(n_ - 1, i + kl_);
      const Index last_col = std::min(n_ - 1, i + kl_ + ku_);
      Index p = i;
      for (Index r = i + 1; r <= last_row; ++r)
        if (std::abs(at(r, i)) > std::abs(at(p, i))) p = r;
      if (!(std::abs(at(p, i)) > tol)) throw SingularMatrix("banded_lu: pivot below tolerance at row " + std::to_string(i));
      piv_[static_cast<std::size_t>(i)] = p;
      if (p != i)
        for (Index c = i; c <= last_col; ++c) std::swap(at(i, c), at(p, c));
      const Scalar inv = Scalar(1) / at(i, i);
      inv_diag_[static_cast<std::size_t>(i)] = inv;
      for (Index r = i + 1; r <= last_row; ++r) {
        const Scalar l = at(r, i) * inv;
        mult(i, r) = l;
        at(r, i) = Scalar(0);
        if (l == Scalar(0)) continue;
        for (Index c = i + 1; c <= last_col; ++c) at(r, c) -= l * at(i, c);
      }
    }
  }

  Index n_ = 0, kl_ = 0, ku_ = 0, width_ = 1;
  std::vector<Scalar> work_, mult_, inv_diag_;
  std::vector<Index> piv_;
};

// Dense LU with partial pivoting that refuses numerically singular input.
template <class Scalar>
class DenseLU {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  DenseLU() = default;
  explicit DenseLU(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("dense_lu: matrix is not square");
    lu_.compute(a);
    const auto scale = a.cwiseAbs().maxCoeff();
    const auto min_pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot > kPivotTolerance * (scale > 0 ? scale : 1.0)))
      throw SingularMatrix("dense_lu: pivot below tolerance");
  }

  Index size() const { return lu_.rows(); }

  template <class Rhs>
  Matrix solve(const Rhs& b) const {
    if (b.rows() != size()) throw DimensionMismatch("dense_solve: right-hand side has wrong length");
    return lu_.solve(Matrix(b));
  }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
};

// Factorization of a matrix that is banded except for its last `border` rows
// and columns, which may be dense. Covers periodic (circulant-banded) matrices,
// whose wrap-around corners fall into the border, and the row-replaced
// antiderivative matrix. The leading block goes through BandedLU and the
// border through a dense Schur complement; if either is singular the whole
// matrix is factored densely (n <= kDenseFallbackLimit).
template <class Scalar>
class BorderedLU {
 public:
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  static constexpr Index kDenseFallbackLimit = 2049;

  BorderedLU() = default;

  BorderedLU(const SparseRowMatrix<Scalar>& m, Index border) {
    if (m.rows() != m.cols()) throw DimensionMismatch("bordered_lu: matrix is not square");
    n_ = m.rows();
    border_ = std::clamp<Index>(border, 0, n_);
    try {
      factor_bordered(m);
    } catch (const SingularMatrix&) {
      if (n_ > kDenseFallbackLimit) throw;
      dense_ = DenseLU<Scalar>(Matrix(m));
    }
  }

  Index size() const { return n_; }
  bool uses_dense_fallback() const { return dense_.has_value(); }

  void solve_inplace(RowMatrix<Scalar>& x) const {
    if (x.rows() != n_) throw DimensionMismatch("bordered_solve: right-hand side has wrong length");
    if (dense_) {
      RowMatrix<Scalar> sol = dense_->solve(x);
      x = std::move(sol);
      return;
    }
    const Index lead = n_ - border_;
    RowMatrix<Scalar> top = x.topRows(lead);
    lead_.solve_inplace(top);
    if (border_ > 0) {
      RowMatrix<Scalar> z = schur_.solve(x.bottomRows(border_) - lower_ * top);
      top.noalias() -= upper_solved_ * z;
      x.bottomRows(border_) = z;
    }
    x.topRows(lead) = top;
  }

  template <class Vec>
  void solve_vector_inplace(Vec&& x) const {
    if (x.size() != n_) throw DimensionMismatch("bordered_solve: right-hand side has wrong length");
    if (dense_) {
      Vector<Scalar> sol = dense_->solve(Vector<Scalar>(x));
      x = sol;
      return;
    }
    const Index lead = n_ - border_;
    lead_.solve_vector_inplace(x.head(lead));
    if (border_ > 0) {
      Vector<Scalar> z = schur_.solve(x.tail(border_) - lower_ * x.head(lead));
      x.head(lead) -= upper_solved_ * z;
      x.tail(border_) = z;
    }
  }

 private:
  void factor_bordered(const SparseRowMatrix<Scalar>& m) {
    const Index lead = n_ - border_;
    SparseRowMatrix<Scalar> a = m.topLeftCorner(lead, lead);
    lead_ = BandedLU<Scalar>(a);
    if (border_ == 0) return;
    RowMatrix<Scalar> b = Matrix(m.topRightCorner(lead, border_));
    lower_ = m.bottomLeftCorner(border_, lead);
    lead_.solve_inplace(b);
    upper_solved_ = std::move(b);
    Matrix s = Matrix(m.bottomRightCorner(border_, border_)) - lower_ * upper_solved_;
    schur_ = DenseLU<Scalar>(s);
  }

  Index n_ = 0, border_ = 0;
  BandedLU<Scalar> lead_;
  SparseRowMatrix<Scalar> lower_;
  RowMatrix<Scalar> upper_solved_;
  DenseLU<Scalar> schur_;
  std::optional<DenseLU<Scalar>> dense_;
};

template <class Scalar>
BandedLU<Scalar> banded_lu(const SparseRowMatrix<Scalar>& a) {
  return BandedLU<Scalar>(a);
}

template <class Scalar>
Vector<Scalar> banded_solve(const BandedLU<Scalar>& lu, Vector<Scalar> rhs) {
  lu.solve_vector_inplace(rhs);
  return rhs;
}

template <class Scalar>
DenseLU<Scalar> dense_lu(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
  return DenseLU<Scalar>(a);
}

template <class Scalar>
Vector<Scalar> dense_solve(const DenseLU<Scalar>& lu, const Vector<Scalar>& rhs) {
  return lu.solve(rhs);
}

}  // namespace kp
