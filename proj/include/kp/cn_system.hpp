#pragma once

#include "kp/field.hpp"
#include "kp/gmres.hpp"
#include "kp/modal.hpp"

namespace kp {

// The compact discretization on a 2D grid: D_x, D_xxx, (Dbar_x)^{-1} along x
// (periodic, nx odd) and D_y, D_yy along y with the grid's y boundary.
struct CompactOperators2D {
  Grid2D grid;
  int order = 4;
  CompactOperator1D dx, dxxx, dy, dyy;
  AntiderivativeOperator1D anti;

  CompactOperators2D(const Grid2D& g, int accuracy_order);
};

// L U = (I (x) D_xxx) U + lambda (D_yy (x) (Dbar_x)^{-1}) U
RowMatrixXd linear_part(const CompactOperators2D& ops, double lambda, const RowMatrixXd& u);

// A U = U + (dt/2) L U, the left-hand matrix of the Crank-Nicolson step.
RowMatrixXd cn_apply(const CompactOperators2D& ops, double lambda, double dt, const RowMatrixXd& u);
LinearMap cn_map(const CompactOperators2D& ops, double lambda, double dt);

// Exact main diagonal of A, flattened like the field. Uses only 1D operator diagonals.
Eigen::VectorXd cn_diagonal(const CompactOperators2D& ops, double lambda, double dt);

// Dense A for small grids (test oracle).
Eigen::MatrixXd cn_dense(const CompactOperators2D& ops, double lambda, double dt);

// Exact inverse of A in x-Fourier space: D_xxx and (Dbar_x)^{-1} are circulant,
// so each x-mode leaves a banded system in y.
class CompactModalPreconditioner {
 public:
  CompactModalPreconditioner(const CompactOperators2D& ops, double lambda, double dt);
  RowMatrixXd apply(const RowMatrixXd& r) const;
  LinearMap as_map() const;

 private:
  Grid2D grid_;
  RowFft fft_;
  ModalYSolver solver_;
};

}  // namespace kp
