#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "kp/compact.hpp"
#include "test_support.hpp"

using namespace kp;
using std::numbers::pi;

namespace {

Rational factorial(int n) {
  Rational r(1);
  for (int i = 2; i <= n; ++i) r *= Rational(i);
  return r;
}

Rational rpow(std::int64_t base, int e) {
  Rational r(1);
  for (int i = 0; i < e; ++i) r *= Rational(base);
  return r;
}

// Residuals of the order conditions written out per derivative, l = 0 being
// the consistency row 1 + 2 alpha = a + b.
std::vector<Rational> order_condition_residuals(const CoefficientSet& c) {
  std::vector<Rational> res{Rational(1) + Rational(2) * c.alpha - c.a - c.b};
  for (int l = 1; l <= c.accuracy_order / 2 - 1; ++l) {
    Rational r;
    switch (c.derivative_order) {
      case 1:
        r = Rational(2 * (2 * l + 1)) * c.alpha - c.a - rpow(4, l) * c.b;
        break;
      case 2:
        r = Rational(2) * c.alpha / factorial(2 * l) - Rational(2) * (rpow(4, l) * c.b + c.a) / factorial(2 * l + 2);
        break;
      case 3:
        r = Rational(2) * c.alpha / factorial(2 * l) -
            (Rational(2) * c.a * (rpow(2, 2 * (l + 1)) - Rational(1)) +
             Rational(3, 4) * c.b * (rpow(3, 2 * (l + 1)) - Rational(1))) /
                factorial(2 * l + 3);
        break;
    }
    res.push_back(r);
  }
  return res;
}

// Analytic k-th derivative of sin(w x + phase).
double sin_derivative(int k, double w, double x, double phase) {
  const double arg = w * x + phase + k * pi / 2;
  return std::pow(w, k) * std::sin(arg);
}

double periodic_max_error(int k, int m, Index n, double w) {
  const double length = 2 * pi;
  const double h = length / static_cast<double>(n);
  const auto op = build_operator(n, h, k, m, BcKind::Periodic);
  Eigen::VectorXd f(n), exact(n);
  for (Index i = 0; i < n; ++i) {
    const double x = -pi + static_cast<double>(i) * h;
    f(i) = std::sin(w * x + 0.3);
    exact(i) = sin_derivative(k, w, x, 0.3);
  }
  return (apply(op, f) - exact).cwiseAbs().maxCoeff() / std::pow(w, k);
}

}  // namespace

TEST_CASE("interior coefficients match the classical closed forms") {
  auto c16 = interior_coefficients(1, 6);
  CHECK(c16.alpha == Rational(1, 3));
  CHECK(c16.a == Rational(14, 9));
  CHECK(c16.b == Rational(1, 9));

  auto c12 = interior_coefficients(1, 2);
  CHECK(c12.alpha == Rational(0));
  CHECK(c12.a == Rational(1));
  CHECK(c12.b == Rational(0));

  auto c14 = interior_coefficients(1, 4);
  CHECK(c14.alpha == Rational(1, 4));
  CHECK(c14.a == Rational(3, 2));
  CHECK(c14.b == Rational(0));

  // Frozen from the order-condition oracle above (exact rationals).
  auto c26 = interior_coefficients(2, 6);
  CHECK(c26.alpha == Rational(2, 11));
  CHECK(c26.a == Rational(12, 11));
  CHECK(c26.b == Rational(3, 11));

  auto c36 = interior_coefficients(3, 6);
  CHECK(c36.alpha == Rational(7, 16));
  CHECK(c36.a == Rational(2));
  CHECK(c36.b == Rational(-1, 8));
}

TEST_CASE("every shipped coefficient set satisfies its order conditions exactly") {
  for (int k = 1; k <= 3; ++k)
    for (int m : {2, 4, 6}) {
      CAPTURE(k);
      CAPTURE(m);
      const auto c = interior_coefficients(k, m);
      for (const Rational& r : order_condition_residuals(c)) CHECK(r == Rational(0));
      CHECK(abs(c.alpha) < Rational(1, 2));
    }
}

TEST_CASE("unsupported derivative/order pairs are rejected") {
  CHECK_THROWS_AS(interior_coefficients(4, 2), UnsupportedOrder);
  CHECK_THROWS_AS(interior_coefficients(1, 8), UnsupportedOrder);
  CHECK_THROWS_AS(interior_coefficients(2, 3), UnsupportedOrder);
  CHECK_THROWS_AS(build_operator(64, 0.1, 1, 5, BcKind::Periodic), UnsupportedOrder);
  CHECK_THROWS_AS(build_operator(5, 0.1, 3, 6, BcKind::Periodic), GridTooSmall);
  CHECK_THROWS_AS(build_operator(32, 0.1, 2, 4, BcKind::OneSided), UnsupportedOrder);
}

TEST_CASE("derivative of a constant vanishes") {
  for (int k = 1; k <= 3; ++k)
    for (int m : {2, 4, 6}) {
      const auto op = build_operator(64, 0.1, k, m, BcKind::Periodic);
      const Eigen::VectorXd out = apply(op, Eigen::VectorXd::Constant(64, 3.5));
      CHECK(out.cwiseAbs().maxCoeff() <= 1e-13 * 3.5 / std::pow(0.1, k));
    }
  const auto op = build_operator(64, 0.1, 1, 6, BcKind::Periodic);
  CHECK(apply(op, Eigen::VectorXd::Ones(64)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("measured convergence slopes match the nominal order") {
  // Five wavelengths keep the n = 257 error of D_xxx above its roundoff floor.
  const std::vector<Index> sizes{33, 65, 129, 257};
  for (int k = 1; k <= 3; ++k)
    for (int m : {2, 4, 6}) {
      std::vector<double> hs, errs;
      for (Index n : sizes) {
        hs.push_back(2 * pi / static_cast<double>(n));
        errs.push_back(periodic_max_error(k, m, n, 5.0));
      }
      const double slope = test::loglog_slope(hs, errs);
      CAPTURE(k);
      CAPTURE(m);
      CAPTURE(slope);
      CHECK(std::abs(slope - m) <= 0.3);
    }
}

TEST_CASE("periodic matrices: symmetry and column-sum law") {
  for (int k = 1; k <= 3; ++k)
    for (int m : {2, 4, 6}) {
      const auto op = build_operator(31, 0.2, k, m, BcKind::Periodic);
      const Eigen::MatrixXd p = Eigen::MatrixXd(op.lhs());
      const Eigen::MatrixXd q = Eigen::MatrixXd(op.rhs());
      CHECK((p - p.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(p.diagonal().isOnes());
      if (k % 2 == 1) CHECK((q + q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * q.cwiseAbs().maxCoeff());
      const Eigen::RowVectorXd pcol = p.colwise().sum();
      const Eigen::RowVectorXd qcol = q.colwise().sum();
      CHECK(qcol.cwiseAbs().maxCoeff() <= 1e-12 * q.cwiseAbs().maxCoeff());
      CHECK((pcol.array() - pcol(0)).abs().maxCoeff() <= 1e-15);
      CHECK(std::abs(pcol(0)) > 0.5);
    }
}

TEST_CASE("matrix-free application equals the dense inverse") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (BcKind bc : {BcKind::Periodic, BcKind::Neumann0, BcKind::Dirichlet0}) {
    for (int k = 1; k <= 3; ++k)
      for (int m : {2, 4, 6}) {
        const Index n = 16;
        const auto op = build_operator(n, 0.25, k, m, bc);
        const Eigen::MatrixXd dense = Eigen::MatrixXd(op.lhs()).fullPivLu().solve(Eigen::MatrixXd(op.rhs()));
        double worst = 0;
        for (int trial = 0; trial < 100; ++trial) {
          Eigen::VectorXd f(n);
          for (auto& v : f) v = gauss(rng);
          const Eigen::VectorXd ref = dense * f;
          worst = std::max(worst, (apply(op, f) - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff());
        }
        CHECK(worst <= 1e-12);
      }
  }
  const auto op = build_operator(17, 0.25, 1, 4, BcKind::OneSided);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(op.lhs()).fullPivLu().solve(Eigen::MatrixXd(op.rhs()));
  Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(17, -1.0, 2.0).array().sin();
  CHECK((apply(op, f) - dense * f).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("column and row batch application agree with single vectors") {
  const auto op = build_operator(21, 0.1, 3, 6, BcKind::Periodic);
  RowMatrixXd block = RowMatrixXd::Random(21, 5);
  const RowMatrixXd cols = op.apply_columns(block);
  const RowMatrixXd rows = op.apply_rows(block.transpose());
  for (Index j = 0; j < 5; ++j) {
    const Eigen::VectorXd ref = apply(op, block.col(j));
    CHECK((cols.col(j) - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
    CHECK((rows.row(j).transpose() - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("mirror boundaries keep the interior order for symmetric data") {
  // Cell-centred nodes on [0, pi]; cos is even about both faces, sin(2x) odd.
  for (int m : {2, 4, 6}) {
    std::vector<double> hs, errs_n, errs_d;
    for (Index n : {20, 40, 80, 160}) {
      const double h = pi / static_cast<double>(n);
      Eigen::VectorXd fe(n), fo(n), de(n), dd(n);
      for (Index j = 0; j < n; ++j) {
        const double y = (static_cast<double>(j) + 0.5) * h;
        fe(j) = std::cos(3 * y), de(j) = -9 * std::cos(3 * y);
        fo(j) = std::sin(2 * y), dd(j) = -4 * std::sin(2 * y);
      }
      hs.push_back(h);
      errs_n.push_back((apply(build_operator(n, h, 2, m, BcKind::Neumann0), fe) - de).cwiseAbs().maxCoeff());
      errs_d.push_back((apply(build_operator(n, h, 2, m, BcKind::Dirichlet0), fo) - dd).cwiseAbs().maxCoeff());
    }
    CAPTURE(m);
    CHECK(std::abs(test::loglog_slope(hs, errs_n) - m) <= 0.3);
    CHECK(std::abs(test::loglog_slope(hs, errs_d) - m) <= 0.3);
  }
}

TEST_CASE("boundary closures") {
  const auto c4 = boundary_closure(1, 4, 4);
  REQUIRE(c4.rhs_coeffs.size() == 4);
  CHECK(c4.lhs_coeffs[1] == Rational(3));
  CHECK(c4.rhs_coeffs[0] == Rational(-17, 6));
  CHECK(c4.rhs_coeffs[1] == Rational(3, 2));
  CHECK(c4.rhs_coeffs[2] == Rational(3, 2));
  CHECK(c4.rhs_coeffs[3] == Rational(-1, 6));

  const auto c1 = boundary_closure(1, 1, 2);
  CHECK(c1.lhs_coeffs[1] == Rational(0));
  CHECK(c1.rhs_coeffs == std::vector<Rational>{Rational(-1), Rational(1)});

  for (auto [order, points] : {std::pair{1, 2}, {2, 3}, {2, 2}, {3, 3}, {3, 5}, {4, 4}, {4, 6}}) {
    const auto c = boundary_closure(1, order, points);
    Rational sum(0);
    for (const auto& r : c.rhs_coeffs) sum += r;
    CHECK(sum == Rational(0));
  }
  CHECK_THROWS_AS(boundary_closure(1, 4, 3), UnderdeterminedStencil);
  CHECK_THROWS_AS(boundary_closure(2, 4, 4), UnsupportedOrder);
}

TEST_CASE("one-sided first derivative converges on non-periodic data") {
  for (int m : {2, 4, 6}) {
    std::vector<double> hs, errs;
    for (Index n : {41, 81, 161, 321}) {
      const double h = 1.0 / static_cast<double>(n - 1);
      Eigen::VectorXd f(n), d(n);
      for (Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * h;
        f(i) = std::exp(x) * std::sin(2 * x);
        d(i) = std::exp(x) * (std::sin(2 * x) + 2 * std::cos(2 * x));
      }
      hs.push_back(h);
      errs.push_back((apply(build_operator(n, h, 1, m, BcKind::OneSided), f) - d).cwiseAbs().maxCoeff());
    }
    const double slope = test::loglog_slope(hs, errs);
    CAPTURE(m);
    CAPTURE(slope);
    // Edge closures are at most fourth order, so the global rate saturates there.
    CHECK(slope >= std::min(m, 4) - 0.3);
  }
}

TEST_CASE("antiderivative: odd sizes only") {
  CHECK_THROWS_AS(build_antiderivative(100, 0.1, 4), EvenGridSize);
  CHECK_NOTHROW(build_antiderivative(101, 0.1, 4));
}

TEST_CASE("antiderivative of zero and of cos") {
  for (int m : {2, 4, 6}) {
    const Index n = 129;
    const double h = 2 * pi / static_cast<double>(n);
    const auto op = build_antiderivative(n, h, m);
    CHECK(apply_antiderivative(op, Eigen::VectorXd::Zero(n)).cwiseAbs().maxCoeff() == 0.0);
    Eigen::VectorXd f(n), prim(n);
    for (Index i = 0; i < n; ++i) {
      const double x = -pi + static_cast<double>(i) * h;
      f(i) = std::cos(2 * x);
      prim(i) = std::sin(2 * x) / 2;
    }
    const Eigen::VectorXd out = apply_antiderivative(op, f);
    CHECK(std::abs(out.sum()) <= 1e-12 * out.norm());
    CHECK((out - prim).cwiseAbs().maxCoeff() <= 20 * std::pow(2 * h, m));
  }
}

TEST_CASE("antiderivative output is always zero-sum and inverts D_x on zero-mean data") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int m : {2, 4, 6}) {
    const Index n = 65;
    const auto op = build_antiderivative(n, 0.3, m);
    Eigen::VectorXd f(n);
    for (auto& v : f) v = gauss(rng);
    const Eigen::VectorXd out = apply_antiderivative(op, f);
    CHECK(std::abs(out.sum()) <= 1e-12 * out.norm());

    // Exact inverse of D_x on the zero-mean subspace, whatever the data.
    const auto d1 = build_operator(n, 0.3, 1, m, BcKind::Periodic);
    const Eigen::VectorXd centred = f.array() - f.mean();
    CHECK((apply(d1, out) - centred).cwiseAbs().maxCoeff() <= 1e-10 * centred.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("antiderivative round trip converges at the scheme order for smooth data") {
  for (int m : {2, 4, 6}) {
    std::vector<double> hs, errs;
    for (Index n : {33, 65, 129, 257}) {
      const double h = 2 * pi / static_cast<double>(n);
      const auto anti = build_antiderivative(n, h, m);
      Eigen::VectorXd f(n), prim(n);
      for (Index i = 0; i < n; ++i) {
        const double x = -pi + static_cast<double>(i) * h;
        f(i) = 3 * std::cos(3 * x) + std::sin(x);  // primitive sin(3x) - cos(x), zero mean
        prim(i) = std::sin(3 * x) - std::cos(x);
      }
      hs.push_back(h);
      errs.push_back((apply_antiderivative(anti, f) - prim).cwiseAbs().maxCoeff());
    }
    CAPTURE(m);
    CHECK(std::abs(test::loglog_slope(hs, errs) - m) <= 0.3);
  }
}

TEST_CASE("row-replaced Q is singular on even grids") {
  for (int m : {2, 4, 6}) {
    const auto d1 = build_operator(32, 0.1, 1, m, BcKind::Periodic);
    const auto pair = closed_pair(d1);
    CHECK_THROWS_AS(dense_lu(Eigen::MatrixXd(pair.q_bar)), SingularMatrix);
    const auto d1_odd = build_operator(33, 0.1, 1, m, BcKind::Periodic);
    CHECK_NOTHROW(dense_lu(Eigen::MatrixXd(closed_pair(d1_odd).q_bar)));
  }
}
