#pragma once

#include <vector>

#include "tsgls/mesh/mesh.hpp"

namespace tsgls::mesh {

/// Points in parent coordinates and weights summing to the parent measure
/// (2 for the line [-1, 1], 1/2 for the unit triangle, 1/6 for the unit tet).
struct QuadratureRule {
  int dim = 1;
  int degree = 0;
  std::vector<Point> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Degree-2 rule used in assembly.
const QuadratureRule& assembly_rule(ElementType type);

/// Higher-order rule used for error norms (degree 9 line, 5 triangle,
/// 3 tet).
const QuadratureRule& error_rule(ElementType type);

/// Degree-2 rule on a facet of an element of the given type. Points are
/// barycentric coordinates of the facet's nodes and the weights sum to 1, so
/// physical weights are weight * facet measure.
const QuadratureRule& facet_rule(ElementType type);

/// Higher-order facet rule in the same convention (degree 9 segments,
/// degree 5 triangles).
const QuadratureRule& facet_error_rule(ElementType type);

}  // namespace tsgls::mesh
