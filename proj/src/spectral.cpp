#include "kp/spectral.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

namespace kp {
namespace {

Index signed_mode(Index m, Index n) { return 2 * m < n ? m : m - n; }

void check_length(Index got, Index want, const char* what) {
  if (got != want)
    throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                            std::to_string(got));
}

}  // namespace

WavenumberGrid wavenumbers(Index n_modes, double period_length) {
  if (n_modes < 2 || n_modes % 2 != 0)
    throw UnsupportedModeCount("spectral grids need an even number of modes, got " + std::to_string(n_modes));
  if (!(period_length > 0)) throw InvalidArgument("period length must be positive");
  WavenumberGrid w{n_modes, period_length, Eigen::VectorXd(n_modes)};
  const double unit = 2 * std::numbers::pi / period_length;
  for (Index m = 0; m < n_modes; ++m) w.values(m) = unit * static_cast<double>(signed_mode(m, n_modes));
  return w;
}

InverseWavenumberGrid inverse_wavenumbers(const WavenumberGrid& w) {
  InverseWavenumberGrid inv{w.n_modes, Eigen::VectorXd::Zero(w.n_modes)};
  for (Index m = 1; m < w.n_modes; ++m)
    if (!w.is_nyquist(m)) inv.values(m) = 1.0 / w.values(m);
  return inv;
}

Complex derivative_symbol(const WavenumberGrid& w, Index mode, int order) {
  if (order % 2 != 0 && w.is_nyquist(mode)) return 0.0;
  return std::pow(Complex(0.0, w.values(mode)), order);
}

Eigen::VectorXcd forward_transform(const Eigen::VectorXd& f) {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out(f.size());
  fft.fwd(out.data(), f.data(), f.size());
  return out;
}

Eigen::VectorXd backward_transform(const Eigen::VectorXcd& f_hat) {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out(f_hat.size());
  fft.inv(out.data(), f_hat.data(), f_hat.size());
  assert(out.imag().cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, out.real().norm()));
  return out.real();
}

Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& f, const WavenumberGrid& w, int order) {
  check_length(f.size(), w.n_modes, "spectral_derivative");
  if (order < 0) throw InvalidArgument("derivative order must be non-negative");
  Eigen::VectorXcd f_hat = forward_transform(f);
  for (Index m = 0; m < w.n_modes; ++m) f_hat(m) *= derivative_symbol(w, m, order);
  return backward_transform(f_hat);
}

Eigen::VectorXd spectral_antiderivative(const Eigen::VectorXd& f, const InverseWavenumberGrid& w_inv) {
  check_length(f.size(), w_inv.n_modes, "spectral_antiderivative");
  Eigen::VectorXcd f_hat = project_mass_zero(forward_transform(f));
  for (Index m = 0; m < w_inv.n_modes; ++m) f_hat(m) *= Complex(0.0, -w_inv.values(m));  // 1/(ik)
  return backward_transform(f_hat);
}

Eigen::VectorXcd project_mass_zero(Eigen::VectorXcd f_hat) {
  if (f_hat.size() > 0) f_hat(0) = 0.0;
  return f_hat;
}

namespace {

Index largest_prime_factor(Index n) {
  Index largest = 1;
  for (Index f = 2; f * f <= n; ++f)
    while (n % f == 0) largest = f, n /= f;
  return std::max(largest, n);
}

}  // namespace

RowFft::RowFft(Index n) : n_(n) {
  if (n < 2) throw UnsupportedModeCount("row transform needs at least 2 points");
  fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  dense_ = largest_prime_factor(n) > 31 && n <= 8192;
  if (!dense_) return;
  const Index m = modes();
  fwd_cos_.resize(n, m);
  fwd_sin_.resize(n, m);
  inv_cos_.resize(m, n);
  inv_sin_.resize(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < m; ++k) {
      const double angle = 2 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
      const double c = std::cos(angle), s = std::sin(angle);
      const double weight = (k == 0 || 2 * k == n ? 1.0 : 2.0) / static_cast<double>(n);
      fwd_cos_(j, k) = c;
      fwd_sin_(j, k) = -s;
      inv_cos_(k, j) = weight * c;
      inv_sin_(k, j) = -weight * s;
    }
}

RowMatrixXcd RowFft::forward(const Eigen::Ref<const RowMatrixXd>& rows) const {
  check_length(rows.cols(), n_, "RowFft::forward");
  RowMatrixXcd out(rows.rows(), modes());
  if (dense_) {
    out.real() = rows * fwd_cos_;
    out.imag() = rows * fwd_sin_;
    return out;
  }
  Eigen::VectorXd buf(n_);
  for (Index r = 0; r < rows.rows(); ++r) {
    buf = rows.row(r).transpose();
    fft_.fwd(out.row(r).data(), buf.data(), n_);
  }
  return out;
}

RowMatrixXd RowFft::backward(const Eigen::Ref<const RowMatrixXcd>& modes_in) const {
  check_length(modes_in.cols(), modes(), "RowFft::backward");
  RowMatrixXd out(modes_in.rows(), n_);
  if (dense_) {
    // sin vanishes on the zero and Nyquist columns, so their imaginary parts drop out
    out.noalias() = modes_in.real() * inv_cos_;
    out.noalias() += modes_in.imag() * inv_sin_;
    return out;
  }
  Eigen::VectorXcd buf(modes());
  for (Index r = 0; r < modes_in.rows(); ++r) {
    buf = modes_in.row(r).transpose();
    // The real inverse reads the zero and Nyquist modes as real.
    buf(0) = buf(0).real();
    if (n_ % 2 == 0) buf(n_ / 2) = buf(n_ / 2).real();
    fft_.inv(out.row(r).data(), buf.data(), n_);
  }
  return out;
}

Fft2D::Fft2D(Index nx, Index ny) : rows_(nx), ny_(ny) {
  if (ny < 1) throw UnsupportedModeCount("2D transform needs ny >= 1");
}

void Fft2D::transform_columns(RowMatrixXcd& a, bool inverse) const {
  if (ny_ == 1) return;
  Eigen::VectorXcd in(ny_), out(ny_);
  for (Index c = 0; c < a.cols(); ++c) {
    in = a.col(c);
    if (inverse)
      fft_.inv(out.data(), in.data(), ny_);
    else
      fft_.fwd(out.data(), in.data(), ny_);
    a.col(c) = out;
  }
}

RowMatrixXcd Fft2D::forward(const Eigen::Ref<const RowMatrixXd>& u) const {
  check_length(u.rows(), ny_, "Fft2D::forward");
  RowMatrixXcd a = rows_.forward(u);
  transform_columns(a, false);
  return a;
}

RowMatrixXd Fft2D::backward(RowMatrixXcd u_hat) const {
  check_length(u_hat.rows(), ny_, "Fft2D::backward");
  transform_columns(u_hat, true);
  return rows_.backward(u_hat);
}

void dealias_two_thirds(RowMatrixXcd& u_hat, Index nx, Index ny) {
  for (Index j = 0; j < u_hat.rows(); ++j) {
    const bool drop_row = 3 * std::abs(signed_mode(j, ny)) > ny;
    for (Index i = 0; i < u_hat.cols(); ++i)
      if (drop_row || 3 * i > nx) u_hat(j, i) = 0.0;
  }
}

SpectralOperator1D::SpectralOperator1D(Index n_modes, double period_length, int order)
    : grid_(wavenumbers(n_modes, period_length)), symbol_(n_modes / 2 + 1), fft_(n_modes) {
  if (order == 0 || order < -1) throw InvalidArgument("spectral operator order must be -1 or >= 1");
  const InverseWavenumberGrid inv = inverse_wavenumbers(grid_);
  for (Index m = 0; m <= n_modes / 2; ++m)
    symbol_(m) = order == -1 ? Complex(0.0, -inv.values(m)) : derivative_symbol(grid_, m, order);
}

RowMatrixXd SpectralOperator1D::apply_rows(const Eigen::Ref<const RowMatrixXd>& rows) const {
  RowMatrixXcd hat = fft_.forward(rows);
  hat.array().rowwise() *= symbol_.transpose().array();
  return fft_.backward(hat);
}

RowMatrixXd SpectralOperator1D::apply_columns(const Eigen::Ref<const RowMatrixXd>& columns) const {
  const RowMatrixXd t = columns.transpose();
  return apply_rows(t).transpose();
}

Eigen::VectorXd SpectralOperator1D::apply(const Eigen::VectorXd& f) const {
  check_length(f.size(), size(), "spectral apply");
  return apply_rows(f.transpose()).transpose();
}

}  // namespace kp
