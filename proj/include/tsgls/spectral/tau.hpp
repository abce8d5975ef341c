#pragma once

#include <span>

#include "tsgls/spectral/matrices.hpp"
#include "tsgls/types.hpp"

namespace tsgls::spectral {

/// Stabilization matrix at one quadrature point, with its square root kept
/// for assembling least-squares products as (Q^H a)^H (Q^H b).
struct TauMatrix {
  int n_modes = 1;
  CMatrix tau;
  CMatrix sqrt_tau;

  int size() const { return 2 * n_modes - 1; }
};

/// Contraction G_ij G_ij.
double metric_contraction(const SpatialMatrix& g);

/// sum_ij A_i G_ij A_j for dense convolution matrices.
CMatrix convective_metric(std::span<const CMatrix> a, const SpatialMatrix& g);

/// tau = [A_i G_ij A_j + c_i kappa^2 (G_ij G_ij) I]^{-1/2}.
///
/// `a` holds one dense convolution matrix per spatial direction. Rejects a
/// non-SPD metric, negative kappa, and a singular argument (kappa = 0 with
/// no convection).
TauMatrix compute_tau(std::span<const CMatrix> a, const SpatialMatrix& g,
                      double kappa, double c_i);

TauMatrix compute_tau(std::span<const ConvolutionMatrix> a,
                      const SpatialMatrix& g, double kappa, double c_i);

/// Steady scalar value (u G u + c_i kappa^2 G:G)^{-1/2}.
double steady_tau(std::span<const double> u, const SpatialMatrix& g,
                  double kappa, double c_i);

}  // namespace tsgls::spectral
