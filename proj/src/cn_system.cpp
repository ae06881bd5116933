#include "kp/cn_system.hpp"

namespace kp {

CompactOperators2D::CompactOperators2D(const Grid2D& g, int accuracy_order)
    : grid(g),
      order(accuracy_order),
      dx(g.nx, g.hx(), 1, accuracy_order, BcKind::Periodic),
      dxxx(g.nx, g.hx(), 3, accuracy_order, BcKind::Periodic),
      dy(g.ny, g.hy(), 1, accuracy_order, g.bc_y),
      dyy(g.ny, g.hy(), 2, accuracy_order, g.bc_y),
      anti(g.nx, g.hx(), accuracy_order) {
  g.validate();
}

RowMatrixXd linear_part(const CompactOperators2D& ops, double lambda, const RowMatrixXd& u) {
  RowMatrixXd out = ops.dxxx.apply_rows(u);
  if (lambda != 0.0) out += lambda * ops.anti.apply_rows(ops.dyy.apply_columns(u));
  return out;
}

RowMatrixXd cn_apply(const CompactOperators2D& ops, double lambda, double dt, const RowMatrixXd& u) {
  return u + (0.5 * dt) * linear_part(ops, lambda, u);
}

LinearMap cn_map(const CompactOperators2D& ops, double lambda, double dt) {
  const Index nx = ops.grid.nx, ny = ops.grid.ny;
  return {nx * ny, [&ops, lambda, dt, nx, ny](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            const RowMatrixXd out = cn_apply(ops, lambda, dt, Eigen::Map<const RowMatrixXd>(v.data(), ny, nx));
            return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
          }};
}

Eigen::VectorXd cn_diagonal(const CompactOperators2D& ops, double lambda, double dt) {
  const Eigen::VectorXd d3 = dense_matrix(ops.dxxx).diagonal();
  const Eigen::VectorXd da = dense_matrix(ops.anti).diagonal();
  const Eigen::VectorXd dyy = dense_matrix(ops.dyy).diagonal();
  const Index nx = ops.grid.nx, ny = ops.grid.ny;
  Eigen::VectorXd diag(nx * ny);
  for (Index j = 0; j < ny; ++j)
    diag.segment(j * nx, nx) = (1.0 + 0.5 * dt * (d3 + lambda * dyy(j) * da).array()).matrix();
  return diag;
}

Eigen::MatrixXd cn_dense(const CompactOperators2D& ops, double lambda, double dt) {
  const Grid2D& g = ops.grid;
  const Identity1D iy{g.ny};
  Eigen::MatrixXd a = dense_assemble(ops.dxxx, iy, g);
  a += lambda * dense_assemble(ops.anti, ops.dyy, g);
  a *= 0.5 * dt;
  a += Eigen::MatrixXd::Identity(g.size(), g.size());
  return a;
}

CompactModalPreconditioner::CompactModalPreconditioner(const CompactOperators2D& ops, double lambda, double dt)
    : grid_(ops.grid), fft_(ops.grid.nx) {
  const Eigen::VectorXcd s3 = circulant_symbol(ops.dxxx);
  const Eigen::VectorXcd sa = circulant_symbol(ops.anti);
  const Eigen::VectorXcd cp = (1.0 + 0.5 * dt * s3.array()).matrix();
  const Eigen::VectorXcd cq = (0.5 * dt * lambda) * sa;
  solver_ = ModalYSolver(ops.dyy, cp, cq);
}

RowMatrixXd CompactModalPreconditioner::apply(const RowMatrixXd& r) const {
  RowMatrixXcd hat = fft_.forward(r);
  solver_.solve_inplace(hat);
  return fft_.backward(hat);
}

LinearMap CompactModalPreconditioner::as_map() const {
  const Index nx = grid_.nx, ny = grid_.ny;
  return {nx * ny, [this, nx, ny](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            const RowMatrixXd out = apply(Eigen::Map<const RowMatrixXd>(v.data(), ny, nx));
            return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
          }};
}

}  // namespace kp
