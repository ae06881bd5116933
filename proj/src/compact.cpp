#include "kp/compact.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

namespace kp {
namespace {

constexpr int kMaxOffset = 3;
using OffsetWeights = std::array<Rational, 2 * kMaxOffset + 1>;  // offsets -3..3

Rational& at_offset(OffsetWeights& w, int offset) { return w[static_cast<std::size_t>(offset + kMaxOffset)]; }

// Difference groups A (inner) and B (outer) of the symmetric stencils.
std::pair<OffsetWeights, OffsetWeights> difference_groups(int k) {
  OffsetWeights ga{}, gb{};
  switch (k) {
    case 1:
      at_offset(ga, 1) = Rational(1, 2), at_offset(ga, -1) = Rational(-1, 2);
      at_offset(gb, 2) = Rational(1, 4), at_offset(gb, -2) = Rational(-1, 4);
      break;
    case 2:
      at_offset(ga, 1) = 1, at_offset(ga, 0) = -2, at_offset(ga, -1) = 1;
      at_offset(gb, 2) = Rational(1, 4), at_offset(gb, 0) = Rational(-1, 2), at_offset(gb, -2) = Rational(1, 4);
      break;
    case 3:
      at_offset(ga, 2) = Rational(1, 2), at_offset(ga, -2) = Rational(-1, 2);
      at_offset(ga, 1) = -1, at_offset(ga, -1) = 1;
      at_offset(gb, 3) = Rational(1, 8), at_offset(gb, -3) = Rational(-1, 8);
      at_offset(gb, 1) = Rational(-3, 8), at_offset(gb, -1) = Rational(3, 8);
      break;
    default:
      throw UnsupportedOrder("derivative order " + std::to_string(k));
  }
  return {ga, gb};
}

Rational ipow(Rational x, int q) {
  Rational r(1);
  for (int i = 0; i < q; ++i) r *= x;
  return r;
}

// q (q-1) ... (q-k+1)
Rational falling(int q, int k) {
  Rational r(1);
  for (int i = 0; i < k; ++i) r *= Rational(q - i);
  return r;
}

Rational moment(const OffsetWeights& g, int q) {
  Rational s(0);
  for (int j = -kMaxOffset; j <= kMaxOffset; ++j) s += g[static_cast<std::size_t>(j + kMaxOffset)] * ipow(Rational(j), q);
  return s;
}

bool valid_pair(int k, int m) { return k >= 1 && k <= 3 && (m == 2 || m == 4 || m == 6); }

}  // namespace

int CoefficientSet::half_width() const {
  const bool outer = !(b == Rational(0));
  if (derivative_order == 3) return outer ? 3 : 2;
  return outer ? 2 : 1;
}

std::vector<Rational> CoefficientSet::stencil() const {
  const auto [ga, gb] = difference_groups(derivative_order);
  const int w = half_width();
  std::vector<Rational> s(static_cast<std::size_t>(2 * w + 1));
  for (int j = -w; j <= w; ++j) {
    const auto idx = static_cast<std::size_t>(j + kMaxOffset);
    s[static_cast<std::size_t>(j + w)] = a * ga[idx] + b * gb[idx];
  }
  return s;
}

CoefficientSet interior_coefficients(int derivative_order, int accuracy_order) {
  const int k = derivative_order;
  const int m = accuracy_order;
  if (!valid_pair(k, m))
    throw UnsupportedOrder("no compact scheme for derivative " + std::to_string(k) + " at order " + std::to_string(m));
  const auto [ga, gb] = difference_groups(k);

  // Exactness on x^q for q = k, k+2, ..., k+m-2 (odd-parity moments vanish by symmetry).
  RationalMatrix rows;
  std::vector<Rational> rhs;
  for (int q = k; q <= k + m - 2; q += 2) {
    rows.push_back({Rational(2) * falling(q, k), -moment(ga, q), -moment(gb, q)});
    rhs.push_back(q == k ? -falling(q, k) : Rational(0));
  }

  auto solve_with = [&](std::vector<int> pinned) -> std::optional<std::vector<Rational>> {
    RationalMatrix a = rows;
    std::vector<Rational> b = rhs;
    for (int unknown : pinned) {
      std::vector<Rational> row(3, Rational(0));
      row[static_cast<std::size_t>(unknown)] = 1;
      a.push_back(row);
      b.push_back(0);
    }
    return solve_exact(a, b);
  };

  constexpr int kAlpha = 0, kB = 2;
  std::optional<std::vector<Rational>> sol;
  if (m == 2) {
    sol = solve_with({kAlpha, kB});
  } else if (m == 4) {
    sol = solve_with({kB});
    if (!sol || abs((*sol)[0]) >= Rational(1, 2)) sol = solve_with({kAlpha});
  } else {
    sol = solve_with({});
  }
  if (!sol) throw UnsupportedOrder("order conditions are singular");
  return CoefficientSet{k, m, (*sol)[0], (*sol)[1], (*sol)[2]};
}

BoundaryClosure boundary_closure(int derivative_order, int accuracy_order, int stencil_points, EdgePosition position) {
  if (derivative_order != 1) throw UnsupportedOrder("one-sided closures exist only for the first derivative");
  if (accuracy_order < 1) throw UnsupportedOrder("accuracy order must be positive");
  if (stencil_points < accuracy_order)
    throw UnderdeterminedStencil(std::to_string(stencil_points) + " points cannot reach order " +
                                 std::to_string(accuracy_order));

  const bool implicit = stencil_points == accuracy_order;
  const int points = implicit ? stencil_points : accuracy_order + 1;
  const int unknowns = points + (implicit ? 1 : 0);  // [alpha,] c_0 .. c_{points-1}

  RationalMatrix a;
  std::vector<Rational> b;
  for (int q = 0; q <= accuracy_order; ++q) {
    std::vector<Rational> row;
    if (implicit) row.push_back(Rational(q));  // alpha * d/dx x^q at x = 1
    for (int j = 0; j < points; ++j) row.push_back(-ipow(Rational(j), q));
    a.push_back(std::move(row));
    b.push_back(q == 1 ? Rational(-1) : Rational(0));
  }
  if (static_cast<int>(a.size()) != unknowns) throw UnderdeterminedStencil("moment system is not square");
  const auto sol = solve_exact(a, b);
  if (!sol) throw UnderdeterminedStencil("moment system is singular");

  BoundaryClosure c;
  c.position = position;
  c.accuracy_order = accuracy_order;
  const Rational alpha = implicit ? (*sol)[0] : Rational(0);
  c.lhs_coeffs = {Rational(1), alpha};
  c.rhs_coeffs.assign(sol->begin() + (implicit ? 1 : 0), sol->end());
  return c;
}

CompactOperator1D::CompactOperator1D(Index n_points, double h, int derivative_order, int accuracy_order, BcKind bc)
    : n_(n_points), h_(h), bc_(bc), coeffs_(interior_coefficients(derivative_order, accuracy_order)) {
  if (!(h > 0)) throw InvalidArgument("grid spacing must be positive");
  const int k = derivative_order;
  const int w = coeffs_.half_width();
  if (bc == BcKind::OneSided && k != 1)
    throw UnsupportedOrder("one-sided closures exist only for the first derivative");
  if (n_ < 2 * w + 1 || (bc == BcKind::OneSided && n_ < 2 * w + 4))
    throw GridTooSmall(std::to_string(n_) + " points is below the stencil width");

  const double scale = 1.0 / std::pow(h, k);
  std::vector<Eigen::Triplet<double>> pt, qt;

  // Maps a possibly out-of-range index to (column, sign); column < 0 drops it.
  const double mirror = bc == BcKind::Dirichlet0 ? -1.0 : 1.0;
  const double lhs_parity = (k % 2 == 0) ? 1.0 : -1.0;
  auto fold = [&](Index j, bool lhs) -> std::pair<Index, double> {
    if (j >= 0 && j < n_) return {j, 1.0};
    if (bc == BcKind::Periodic) return {((j % n_) + n_) % n_, 1.0};
    const double sign = lhs ? mirror * lhs_parity : mirror;
    return {j < 0 ? -1 - j : 2 * n_ - 1 - j, sign};
  };

  auto interior_row = [&](Index i, const CoefficientSet& cs) {
    const double alpha = cs.alpha.to_double();
    pt.emplace_back(i, i, 1.0);
    for (Index d : {Index(-1), Index(1)}) {
      if (alpha == 0.0) break;
      const auto [col, sign] = fold(i + d, true);
      pt.emplace_back(i, col, sign * alpha);
    }
    const auto st = cs.stencil();
    const int cw = cs.half_width();
    for (int j = -cw; j <= cw; ++j) {
      const double v = st[static_cast<std::size_t>(j + cw)].to_double();
      if (v == 0.0) continue;
      const auto [col, sign] = fold(i + j, false);
      qt.emplace_back(i, col, sign * v * scale);
    }
  };

  if (bc != BcKind::OneSided) {
    for (Index i = 0; i < n_; ++i) interior_row(i, coeffs_);
  } else {
    const int edge_order = std::min(accuracy_order, 4);
    const int edge_points = edge_order == 4 ? 4 : edge_order + 1;
    const BoundaryClosure closure = boundary_closure(1, edge_order, edge_points);
    const double alpha_e = closure.lhs_coeffs[1].to_double();
    for (Index i = 0; i < n_; ++i) {
      const Index d = std::min(i, n_ - 1 - i);
      if (d == 0) {
        const Index s = i == 0 ? 1 : -1;
        pt.emplace_back(i, i, 1.0);
        if (alpha_e != 0.0) pt.emplace_back(i, i + s, alpha_e);
        for (std::size_t j = 0; j < closure.rhs_coeffs.size(); ++j)
          qt.emplace_back(i, i + s * static_cast<Index>(j), static_cast<double>(s) * closure.rhs_coeffs[j].to_double() / h);
      } else if (d < w) {
        interior_row(i, interior_coefficients(1, 4));
      } else {
        interior_row(i, coeffs_);
      }
    }
  }

  p_.resize(n_, n_);
  q_.resize(n_, n_);
  p_.setFromTriplets(pt.begin(), pt.end());
  q_.setFromTriplets(qt.begin(), qt.end());
  p_.prune(0.0);
  q_.prune(0.0);
  const Index border = (bc == BcKind::Periodic && coeffs_.alpha != Rational(0)) ? 1 : 0;
  p_lu_ = BorderedLU<double>(p_, border);
}

RowMatrixXd CompactOperator1D::apply_columns(const Eigen::Ref<const RowMatrixXd>& columns) const {
  if (columns.rows() != n_) throw DimensionMismatch("compact apply: expected " + std::to_string(n_) + " rows");
  RowMatrixXd out = q_ * columns;
  p_lu_.solve_inplace(out);
  return out;
}

RowMatrixXd CompactOperator1D::apply_rows(const Eigen::Ref<const RowMatrixXd>& rows) const {
  if (rows.cols() != n_) throw DimensionMismatch("compact apply: expected " + std::to_string(n_) + " columns");
  RowMatrixXd out = rows * q_.transpose();
  for (Index r = 0; r < out.rows(); ++r) p_lu_.solve_vector_inplace(out.row(r).transpose());
  return out;
}

Eigen::VectorXd CompactOperator1D::apply(const Eigen::VectorXd& f) const {
  if (f.size() != n_) throw DimensionMismatch("compact apply: expected length " + std::to_string(n_));
  Eigen::VectorXd out = q_ * f;
  p_lu_.solve_vector_inplace(out);
  return out;
}

CompactOperator1D build_operator(Index n_points, double h, int derivative_order, int accuracy_order, BcKind bc) {
  return CompactOperator1D(n_points, h, derivative_order, accuracy_order, bc);
}

Eigen::VectorXd apply(const CompactOperator1D& op, const Eigen::VectorXd& f) { return op.apply(f); }

ClosedPair closed_pair(const CompactOperator1D& d1) {
  if (d1.bc() != BcKind::Periodic || d1.derivative_order() != 1)
    throw InvalidArgument("closed_pair needs a periodic first-derivative operator");
  const Index n = d1.size();
  auto close = [n](const SparseMatrixXd& m) {
    std::vector<Eigen::Triplet<double>> t;
    for (Index r = 0; r + 1 < n; ++r)
      for (SparseMatrixXd::InnerIterator it(m, r); it; ++it) t.emplace_back(r, it.col(), it.value());
    for (Index j = 0; j < n; ++j) t.emplace_back(n - 1, j, 1.0);
    SparseMatrixXd out(n, n);
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  return {close(d1.lhs()), close(d1.rhs())};
}

AntiderivativeOperator1D::AntiderivativeOperator1D(Index n_points, double h, int accuracy_order)
    : n_(n_points), h_(h), order_(accuracy_order) {
  if (n_points % 2 == 0)
    throw EvenGridSize("antiderivative needs an odd number of points; the closed matrix is singular for " +
                       std::to_string(n_points));
  const CompactOperator1D d1(n_points, h, 1, accuracy_order, BcKind::Periodic);
  pair_ = closed_pair(d1);
  const Index w = d1.coefficients().half_width();
  q_lu_ = BorderedLU<double>(pair_.q_bar, w % 2 == 1 ? w : w + 1);
}

RowMatrixXd AntiderivativeOperator1D::apply_columns(const Eigen::Ref<const RowMatrixXd>& columns) const {
  if (columns.rows() != n_) throw DimensionMismatch("antiderivative apply: expected " + std::to_string(n_) + " rows");
  const RowMatrixXd centred = columns.rowwise() - columns.colwise().mean();
  RowMatrixXd out = pair_.p_bar * centred;
  q_lu_.solve_inplace(out);
  return out;
}

RowMatrixXd AntiderivativeOperator1D::apply_rows(const Eigen::Ref<const RowMatrixXd>& rows) const {
  if (rows.cols() != n_) throw DimensionMismatch("antiderivative apply: expected " + std::to_string(n_) + " columns");
  const RowMatrixXd centred = rows.colwise() - rows.rowwise().mean();
  RowMatrixXd out = centred * pair_.p_bar.transpose();
  for (Index r = 0; r < out.rows(); ++r) q_lu_.solve_vector_inplace(out.row(r).transpose());
  return out;
}

Eigen::VectorXd AntiderivativeOperator1D::apply(const Eigen::VectorXd& f) const {
  if (f.size() != n_) throw DimensionMismatch("antiderivative apply: expected length " + std::to_string(n_));
  Eigen::VectorXd out = pair_.p_bar * (f.array() - f.mean()).matrix();
  q_lu_.solve_vector_inplace(out);
  return out;
}

AntiderivativeOperator1D build_antiderivative(Index n_points, double h, int accuracy_order) {
  return AntiderivativeOperator1D(n_points, h, accuracy_order);
}

Eigen::VectorXd apply_antiderivative(const AntiderivativeOperator1D& op, const Eigen::VectorXd& f) {
  return op.apply(f);
}

}  // namespace kp
