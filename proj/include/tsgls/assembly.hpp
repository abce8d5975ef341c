#pragma once

#include <algorithm>
#include <vector>

#include "tsgls/field.hpp"
#include "tsgls/mesh/shape.hpp"
#include "tsgls/types.hpp"

namespace tsgls {

/// Element loop with deterministic accumulation: elements are processed in
/// fixed-size chunks, `compute(e, local)` runs (in parallel when requested)
/// into per-element buffers, then `scatter(e, local)` runs serially in
/// element order. Results are identical in serial and parallel mode.
template <class Local, class Compute, class Scatter>
void element_loop(int n_elements, Execution exec, Compute&& compute, Scatter&& scatter,
                  int chunk = 512) {
  std::vector<Local> buffer(static_cast<std::size_t>(std::min(chunk, std::max(n_elements, 1))));
  for (int start = 0; start < n_elements; start += chunk) {
    const int count = std::min(chunk, n_elements - start);
#pragma omp parallel for schedule(dynamic, 8) if (exec == Execution::parallel)
    for (int k = 0; k < count; ++k) compute(start + k, buffer[k]);
    for (int k = 0; k < count; ++k) scatter(start + k, buffer[k]);
  }
}

/// Interpolated modes of direction i at a point with shape values n.
spectral::SpectralCoeffs interpolate_velocity(const VelocityField& v, const mesh::Connectivity& conn,
                                              int nv, const std::array<double, 4>& n, int i);

spectral::SpectralCoeffs interpolate_field(const SpectralField& f, const mesh::Connectivity& conn,
                                           int nv, const std::array<double, 4>& n);

/// Dense convolution matrices of the interpolated velocity, one per
/// direction.
std::vector<CMatrix> convolution_at(const VelocityField& v, const mesh::Connectivity& conn,
                                    int nv, const std::array<double, 4>& n);

/// A_n = A_i n_i.
CMatrix normal_convolution(const std::vector<CMatrix>& a, const Point& normal);

/// Shape values of the parent element at a facet quadrature point given as
/// barycentric weights of the facet nodes.
std::array<double, 4> facet_shape_values(const mesh::Mesh& mesh, const mesh::Facet& facet,
                                         const Point& bary, Point& x);

}  // namespace tsgls
