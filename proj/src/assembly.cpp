#include "tsgls/assembly.hpp"

#include "tsgls/spectral/matrices.hpp"

namespace tsgls {

spectral::SpectralCoeffs interpolate_velocity(const VelocityField& v, const mesh::Connectivity& conn,
                                              int nv, const std::array<double, 4>& n, int i) {
  spectral::SpectralCoeffs out(v.n_modes);
  for (int a = 0; a < nv; ++a) out += n[a] * v.at(conn[a], i);
  return out;
}

spectral::SpectralCoeffs interpolate_field(const SpectralField& f, const mesh::Connectivity& conn,
                                           int nv, const std::array<double, 4>& n) {
  spectral::SpectralCoeffs out(f[conn[0]].n_modes());
  for (int a = 0; a < nv; ++a) out += n[a] * f[conn[a]];
  return out;
}

std::vector<CMatrix> convolution_at(const VelocityField& v, const mesh::Connectivity& conn,
                                    int nv, const std::array<double, 4>& n) {
  std::vector<CMatrix> a;
  a.reserve(v.dim);
  for (int i = 0; i < v.dim; ++i) {
    a.push_back(spectral::build_convolution(interpolate_velocity(v, conn, nv, n, i)).dense());
  }
  return a;
}

CMatrix normal_convolution(const std::vector<CMatrix>& a, const Point& normal) {
  CMatrix an = CMatrix::Zero(a.front().rows(), a.front().cols());
  for (std::size_t i = 0; i < a.size(); ++i) an += normal[i] * a[i];
  return an;
}

std::array<double, 4> facet_shape_values(const mesh::Mesh& mesh, const mesh::Facet& facet,
                                         const Point& bary, Point& x) {
  std::array<double, 4> n{0.0, 0.0, 0.0, 0.0};
  const auto& conn = mesh.elements[facet.element];
  x = {0.0, 0.0, 0.0};
  for (int k = 0; k < mesh.nodes_per_facet(); ++k) {
    for (int a = 0; a < mesh.nodes_per_element(); ++a) {
      if (conn[a] == facet.nodes[k]) n[a] += bary[k];
    }
    for (int d = 0; d < 3; ++d) x[d] += bary[k] * mesh.coords[facet.nodes[k]][d];
  }
  return n;
}

}  // namespace tsgls
