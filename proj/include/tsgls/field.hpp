#pragma once

#include <functional>
#include <vector>

#include "tsgls/linalg/real_map.hpp"
#include "tsgls/mesh/mesh.hpp"
#include "tsgls/spectral/coeffs.hpp"

namespace tsgls {

/// One SpectralCoeffs per mesh node.
using SpectralField = std::vector<spectral::SpectralCoeffs>;

/// Spectral data as a function of position.
using SpatialSpectral = std::function<spectral::SpectralCoeffs(const Point&)>;

SpectralField zero_field(int n_nodes, int n_modes);

/// Nodal interpolant of a spatial function.
SpectralField sample_field(const mesh::Mesh& mesh, const SpatialSpectral& fn);

/// Velocity modes per node and direction, value(node, i).
struct VelocityField {
  int dim = 1;
  int n_modes = 1;
  std::vector<spectral::SpectralCoeffs> values;

  static VelocityField zero(int n_nodes, int dim, int n_modes);
  /// fn(x, i) gives the modes of component i at x.
  static VelocityField from_function(
      const mesh::Mesh& mesh, int n_modes,
      const std::function<spectral::SpectralCoeffs(const Point&, int)>& fn);

  const spectral::SpectralCoeffs& at(int node, int i) const { return values[node * dim + i]; }
  spectral::SpectralCoeffs& at(int node, int i) { return values[node * dim + i]; }
};

/// Pack fields (component-major list of per-node fields) into the complex
/// ordering of a RealLayout.
CVector pack_complex(const std::vector<const SpectralField*>& comps, const linalg::RealLayout& l);
void unpack_complex(const CVector& x, const linalg::RealLayout& l,
                    const std::vector<SpectralField*>& comps);

/// Largest conjugate-symmetry defect |v[-n] - conj(v[n])| over a field.
double symmetry_defect(const SpectralField& f);

}  // namespace tsgls
