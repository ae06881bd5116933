#include "kp/field.hpp"

#include <cmath>

namespace kp {

void Grid2D::validate() const {
  if (!(lx > 0) || !(ly > 0)) throw InvalidArgument("grid half-lengths must be positive");
  if (nx < 1 || ny < 1) throw InvalidArgument("grid sizes must be positive");
  if (bc_x != BcKind::Periodic) throw InvalidArgument("x is always periodic");
  if (bc_y == BcKind::OneSided) throw InvalidArgument("y boundary must be periodic, dirichlet0 or neumann0");
}

Field::Field(const Grid2D& g, RowMatrixXd v) : grid(g), values(std::move(v)) {
  if (values.rows() != g.ny || values.cols() != g.nx)
    throw DimensionMismatch("field values are " + std::to_string(values.rows()) + "x" + std::to_string(values.cols()) +
                            ", grid is " + std::to_string(g.ny) + "x" + std::to_string(g.nx));
}

Field Field::sample(const Grid2D& g, const std::function<double(double, double)>& fn) {
  Field f(g);
  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) f.values(j, i) = fn(g.x(i), g.y(j));
  return f;
}

void require_finite(const Field& f, const std::string& where) {
  if (!f.values.allFinite()) throw NonFiniteValue(where + ": field has NaN or infinite entries");
}

Eigen::VectorXd flatten(const Field& f) { return Eigen::Map<const Eigen::VectorXd>(f.values.data(), f.values.size()); }

Field unflatten(const Grid2D& g, const Eigen::VectorXd& v) {
  if (v.size() != g.size()) throw DimensionMismatch("unflatten: vector length differs from nx * ny");
  return Field(g, Eigen::Map<const RowMatrixXd>(v.data(), g.ny, g.nx));
}

}  // namespace kp
