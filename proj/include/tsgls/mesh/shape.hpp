#pragma once

#include <array>
#include <vector>

#include "tsgls/mesh/mesh.hpp"
#include "tsgls/mesh/quadrature.hpp"

namespace tsgls::mesh {

/// Physical shape gradients, rows = local nodes, cols = spatial directions.
using GradMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 3>;

/// Affine element data, constant over a linear simplex.
struct ElementGeometry {
  double det_j = 0.0;
  GradMatrix grads;
  SpatialMatrix metric;  // G_ij = (dxi_k/dx_i)(dxi_k/dx_j)
};

/// Shape data at one quadrature point.
struct ShapeEval {
  std::array<double, 4> values{};
  GradMatrix grads;
  SpatialMatrix metric;
  double weight = 0.0;  // quadrature weight times |J|
  Point x{};
};

/// Parent-coordinate shape values (line on [-1, 1], simplices barycentric).
std::array<double, 4> parent_shape_values(ElementType type, const Point& xi);

/// Throws InvalidInput naming the element when |J| <= 0.
ElementGeometry element_geometry(const Mesh& mesh, int element);

std::vector<ShapeEval> shape_eval(const Mesh& mesh, int element,
                                  const QuadratureRule& rule);

}  // namespace tsgls::mesh
