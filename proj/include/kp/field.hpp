#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "kp/compact.hpp"

namespace kp {

// Box [-lx, lx) x [-ly, ly) with nx x ny points. Periodic axes use nodes
// -l + i h; mirror-bounded y uses cell centres -ly + (j + 1/2) hy.
struct Grid2D {
  double lx = 1, ly = 1;
  Index nx = 1, ny = 1;
  BcKind bc_x = BcKind::Periodic;
  BcKind bc_y = BcKind::Periodic;

  double hx() const { return 2 * lx / static_cast<double>(nx); }
  double hy() const { return 2 * ly / static_cast<double>(ny); }
  double x(Index i) const { return -lx + static_cast<double>(i) * hx(); }
  double y(Index j) const {
    const double shift = bc_y == BcKind::Periodic ? 0.0 : 0.5;
    return -ly + (static_cast<double>(j) + shift) * hy();
  }
  Index size() const { return nx * ny; }
  double cell_area() const { return hx() * hy(); }

  // Throws InvalidArgument on non-positive extents or unsupported boundary kinds.
  void validate() const;
  bool operator==(const Grid2D&) const = default;
};

// Real state on a grid: values(j, i) = u(x_i, y_j), rows contiguous in x.
struct Field {
  Grid2D grid;
  RowMatrixXd values;

  Field() = default;
  explicit Field(const Grid2D& g) : grid(g), values(RowMatrixXd::Zero(g.ny, g.nx)) {}
  Field(const Grid2D& g, RowMatrixXd v);

  static Field sample(const Grid2D& g, const std::function<double(double, double)>& fn);
};

// Throws NonFiniteValue naming `where` if any entry is NaN or infinite.
void require_finite(const Field& f, const std::string& where);

// Flat index j * nx + i.
Eigen::VectorXd flatten(const Field& f);
Field unflatten(const Grid2D& g, const Eigen::VectorXd& v);

template <class Op>
Field apply_along_x(const Op& op, const Field& f) {
  if (op.size() != f.grid.nx) throw DimensionMismatch("apply_along_x: operator size differs from nx");
  return Field(f.grid, op.apply_rows(f.values));
}

template <class Op>
Field apply_along_y(const Op& op, const Field& f) {
  if (op.size() != f.grid.ny) throw DimensionMismatch("apply_along_y: operator size differs from ny");
  return Field(f.grid, op.apply_columns(f.values));
}

inline constexpr Index kDenseAssembleLimit = 4096;

// Explicit op_y (x) op_x acting on flattened fields.
template <class OpX, class OpY>
Eigen::MatrixXd dense_assemble(const OpX& op_x, const OpY& op_y, const Grid2D& g) {
  if (g.size() > kDenseAssembleLimit)
    throw TooLargeForDense(std::to_string(g.size()) + " unknowns exceeds " + std::to_string(kDenseAssembleLimit));
  if (op_x.size() != g.nx || op_y.size() != g.ny) throw DimensionMismatch("dense_assemble: operator sizes");
  const Eigen::MatrixXd ax = dense_matrix(op_x);
  const Eigen::MatrixXd ay = dense_matrix(op_y);
  return Eigen::kroneckerProduct(ay, ax).eval();
}

}  // namespace kp
