#include "tsgls/field.hpp"

#include <algorithm>

namespace tsgls {

SpectralField zero_field(int n_nodes, int n_modes) {
  return SpectralField(n_nodes, spectral::SpectralCoeffs(n_modes));
}

SpectralField sample_field(const mesh::Mesh& mesh, const SpatialSpectral& fn) {
  SpectralField f;
  f.reserve(mesh.n_nodes());
  for (const auto& x : mesh.coords) f.push_back(fn(x));
  return f;
}

VelocityField VelocityField::zero(int n_nodes, int dim, int n_modes) {
  VelocityField v;
  v.dim = dim;
  v.n_modes = n_modes;
  v.values.assign(static_cast<std::size_t>(n_nodes) * dim, spectral::SpectralCoeffs(n_modes));
  return v;
}

VelocityField VelocityField::from_function(
    const mesh::Mesh& mesh, int n_modes,
    const std::function<spectral::SpectralCoeffs(const Point&, int)>& fn) {
  auto v = zero(mesh.n_nodes(), mesh.dim, n_modes);
  for (int a = 0; a < mesh.n_nodes(); ++a) {
    for (int i = 0; i < mesh.dim; ++i) v.at(a, i) = fn(mesh.coords[a], i);
  }
  return v;
}

CVector pack_complex(const std::vector<const SpectralField*>& comps, const linalg::RealLayout& l) {
  CVector x(l.complex_size());
  for (int node = 0; node < l.n_nodes; ++node) {
    for (int c = 0; c < l.n_comp; ++c) {
      const auto& v = (*comps[c])[node];
      for (int n = -l.n_modes + 1; n < l.n_modes; ++n) x[l.complex_index(node, c, n)] = v[n];
    }
  }
  return x;
}

void unpack_complex(const CVector& x, const linalg::RealLayout& l,
                    const std::vector<SpectralField*>& comps) {
  for (int c = 0; c < l.n_comp; ++c) comps[c]->assign(l.n_nodes, spectral::SpectralCoeffs(l.n_modes));
  for (int node = 0; node < l.n_nodes; ++node) {
    for (int c = 0; c < l.n_comp; ++c) {
      auto& v = (*comps[c])[node];
      for (int n = 0; n < l.n_modes; ++n) v.set(n, x[l.complex_index(node, c, n)]);
    }
  }
}

double symmetry_defect(const SpectralField& f) {
  double d = 0.0;
  for (const auto& v : f) {
    for (int n = 0; n < v.n_modes(); ++n) {
      d = std::max(d, std::abs(v[-n] - std::conj(v[n])));
    }
  }
  return d;
}

}  // namespace tsgls
