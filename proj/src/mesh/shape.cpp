#include "tsgls/mesh/shape.hpp"

namespace tsgls::mesh {

std::array<double, 4> parent_shape_values(ElementType type, const Point& xi) {
  switch (type) {
    case ElementType::line2:
      return {0.5 * (1.0 - xi[0]), 0.5 * (1.0 + xi[0]), 0.0, 0.0};
    case ElementType::tri3:
      return {1.0 - xi[0] - xi[1], xi[0], xi[1], 0.0};
    default:
      return {1.0 - xi[0] - xi[1] - xi[2], xi[0], xi[1], xi[2]};
  }
}

ElementGeometry element_geometry(const Mesh& mesh, int element) {
  const int d = mesh.dim;
  const int nv = d + 1;
  const auto& conn = mesh.elements.at(element);

  // Parent gradients dN/dxi (nv x d).
  GradMatrix dn_dxi = GradMatrix::Zero(nv, d);
  if (d == 1) {
    dn_dxi(0, 0) = -0.5;
    dn_dxi(1, 0) = 0.5;
  } else {
    for (int k = 0; k < d; ++k) {
      dn_dxi(0, k) = -1.0;
      dn_dxi(k + 1, k) = 1.0;
    }
  }
  // J_ij = dx_i/dxi_j.
  SpatialMatrix jac = SpatialMatrix::Zero(d, d);
  for (int a = 0; a < nv; ++a) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) jac(i, j) += mesh.coords[conn[a]][i] * dn_dxi(a, j);
    }
  }
  ElementGeometry geo;
  geo.det_j = jac.determinant();
  if (!(geo.det_j > 0.0)) {
    throw InvalidInput("degenerate element " + std::to_string(element) +
                       " (|J| = " + std::to_string(geo.det_j) + ")");
  }
  const SpatialMatrix jinv = jac.inverse();  // (dxi_k/dx_i) at (k, i)
  geo.grads = dn_dxi * jinv;
  geo.metric = jinv.transpose() * jinv;
  return geo;
}

std::vector<ShapeEval> shape_eval(const Mesh& mesh, int element,
                                  const QuadratureRule& rule) {
  const auto geo = element_geometry(mesh, element);
  const auto type = mesh.type();
  const auto& conn = mesh.elements[element];
  std::vector<ShapeEval> out(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    auto& s = out[q];
    s.values = parent_shape_values(type, rule.points[q]);
    s.grads = geo.grads;
    s.metric = geo.metric;
    s.weight = rule.weights[q] * geo.det_j;
    for (int a = 0; a <= mesh.dim; ++a) {
      for (int i = 0; i < 3; ++i) s.x[i] += s.values[a] * mesh.coords[conn[a]][i];
    }
  }
  return out;
}

}  // namespace tsgls::mesh
