#pragma once

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "kp/banded.hpp"

namespace kp {

using Complex = std::complex<double>;
using RowMatrixXcd = RowMatrix<Complex>;

// Signed angular wavenumbers in FFT order, 2 pi * mode / period_length.
struct WavenumberGrid {
  Index n_modes = 0;
  double period_length = 0;
  Eigen::VectorXd values;

  // True for the unmatched -n/2 mode, which odd symbols leave out.
  bool is_nyquist(Index mode) const { return 2 * mode == n_modes; }
};

// 1 / k with zeros at mode 0 and at the Nyquist mode.
struct InverseWavenumberGrid {
  Index n_modes = 0;
  Eigen::VectorXd values;
};

// Any even n >= 2 is accepted (mixed-radix transforms); odd n throws UnsupportedModeCount.
WavenumberGrid wavenumbers(Index n_modes, double period_length);
InverseWavenumberGrid inverse_wavenumbers(const WavenumberGrid& w);

// (i k)^order, with the Nyquist mode zeroed for odd orders.
Complex derivative_symbol(const WavenumberGrid& w, Index mode, int order);

// Unscaled forward DFT and its 1/n-scaled inverse over full complex spectra.
Eigen::VectorXcd forward_transform(const Eigen::VectorXd& f);
Eigen::VectorXd backward_transform(const Eigen::VectorXcd& f_hat);

Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& f, const WavenumberGrid& w, int order);
Eigen::VectorXd spectral_antiderivative(const Eigen::VectorXd& f, const InverseWavenumberGrid& w_inv);
Eigen::VectorXcd project_mass_zero(Eigen::VectorXcd f_hat);

// Real transforms of every row (length n) into n/2 + 1 non-negative modes.
class RowFft {
 public:
  RowFft() = default;
  explicit RowFft(Index n);

  Index size() const { return n_; }
  Index modes() const { return n_ / 2 + 1; }

  RowMatrixXcd forward(const Eigen::Ref<const RowMatrixXd>& rows) const;
  RowMatrixXd backward(const Eigen::Ref<const RowMatrixXcd>& modes) const;

 private:
  Index n_ = 0;
  mutable Eigen::FFT<double> fft_;
  // kissfft degrades to O(n^2) per row on large prime factors; those lengths use
  // a precomputed real DFT applied as matrix products instead.
  bool dense_ = false;
  Eigen::MatrixXd fwd_cos_, fwd_sin_, inv_cos_, inv_sin_;
};

// x (rows, real half spectrum) then y (columns, full complex) transform of an Ny x Nx array.
class Fft2D {
 public:
  Fft2D() = default;
  Fft2D(Index nx, Index ny);

  Index nx() const { return rows_.size(); }
  Index ny() const { return ny_; }

  RowMatrixXcd forward(const Eigen::Ref<const RowMatrixXd>& u) const;
  RowMatrixXd backward(RowMatrixXcd u_hat) const;

 private:
  void transform_columns(RowMatrixXcd& a, bool inverse) const;

  RowFft rows_;
  Index ny_ = 0;
  mutable Eigen::FFT<double> fft_;
};

// Zeroes every mode with |kx| > nx/3 or |ky| > ny/3 of a spectrum laid out by Fft2D.
void dealias_two_thirds(RowMatrixXcd& u_hat, Index nx, Index ny);

// Spectral derivative (order >= 1) or antiderivative (order == -1) in the 1D operator protocol.
class SpectralOperator1D {
 public:
  SpectralOperator1D() = default;
  SpectralOperator1D(Index n_modes, double period_length, int order);

  Index size() const { return grid_.n_modes; }
  const WavenumberGrid& grid() const { return grid_; }
  // Symbol at non-negative mode m <= n/2.
  Complex symbol(Index mode) const { return symbol_(mode); }

  RowMatrixXd apply_rows(const Eigen::Ref<const RowMatrixXd>& rows) const;
  RowMatrixXd apply_columns(const Eigen::Ref<const RowMatrixXd>& columns) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

 private:
  WavenumberGrid grid_;
  Eigen::VectorXcd symbol_;
  RowFft fft_;
};

}  // namespace kp
