#pragma once

#include <functional>
#include <vector>

#include "tsgls/field.hpp"
#include "tsgls/mesh/mesh.hpp"
#include "tsgls/scalar/scalar_solver.hpp"
#include "tsgls/spectral/coeffs.hpp"

namespace tsgls::verification {

/// Steady 1D convection-diffusion on [0, L] with phi(0) = 0, phi(L) = g:
/// phi = g (exp(u x / kappa) - 1) / (exp(u L / kappa) - 1), evaluated in a
/// shifted form that cannot overflow.
std::function<double(double)> exact_steady_advection_diffusion_1d(double u, double kappa,
                                                                  double length, double g);

/// Fully developed oscillatory flow between walls at y = +-half_width driven
/// by pressure-gradient modes dp/dx. Mode n solves
///   i rho n omega u_n = -G_n + mu u_n''
/// with u_n(+-half_width) = 0. Returns the modes of the axial velocity at
/// distance y from the centerline.
std::function<spectral::SpectralCoeffs(double)> oscillatory_channel_exact(
    const spectral::SpectralCoeffs& pressure_gradient, double rho, double mu, double omega,
    double half_width);

/// Womersley number a sqrt(omega rho / mu) of the fundamental.
double womersley_number(double half_width, double omega, double rho, double mu);

/// L2 norm over the domain summed over all 2N-1 stored modes, computed with
/// the high-order element rule.
double l2_error(const SpectralField& field, const SpatialSpectral& exact, const mesh::Mesh& mesh);
double l2_norm(const SpatialSpectral& exact, int n_modes, const mesh::Mesh& mesh);
double l2_norm(const SpectralField& field, const mesh::Mesh& mesh);

/// Manufactured time-periodic scalar field on a spatially uniform spectral
/// velocity: phi_n(x) = c_n prod_i sin(k x_i + |n| shift). The source is
/// Omega phi + A_i dphi/dx_i - kappa lap(phi) with band-restricted
/// convolutions, so solving with it and Dirichlet data from `exact`
/// approximates `exact`.
struct Manufactured {
  SpatialSpectral exact;
  SpatialSpectral source;
};
Manufactured manufactured_sine(int dim, const std::vector<spectral::SpectralCoeffs>& velocity,
                               double kappa, double omega,
                               const spectral::SpectralCoeffs& amplitudes,
                               double wavenumber = 3.141592653589793, double shift = 0.3);

/// Per-mode L2 errors and norms for modes 0..N-1.
struct ModeErrors {
  std::vector<double> error;
  std::vector<double> norm;

  /// error / norm, or the absolute error when the mode vanishes.
  double relative(int mode) const;
};
ModeErrors l2_error_modes(const SpectralField& field, const SpatialSpectral& exact,
                          const mesh::Mesh& mesh);

struct ErrorReport {
  std::vector<double> h;
  std::vector<double> l2_error;
  /// Slope of log error vs log h for consecutive pairs (size h.size() - 1).
  std::vector<double> observed_order;
};

/// Slopes log(e_k / e_{k+1}) / log(h_k / h_{k+1}). Requires at least two
/// levels and strictly decreasing h.
std::vector<double> observed_order(const std::vector<double>& errors, const std::vector<double>& hs);
ErrorReport make_error_report(std::vector<double> hs, std::vector<double> errors);

struct DiagnosticNumbers {
  double alpha_e_min = 0.0;  // smallest element value
  double alpha = 0.0;        // max over quadrature points
  double beta = 0.0;         // element Womersley number with the largest h
};

/// Element Peclet and Womersley numbers of a velocity field with diffusivity
/// kappa (kinematic viscosity for flow problems).
DiagnosticNumbers diagnostics(const VelocityField& velocity, double kappa, double omega,
                              int n_modes, double c_i, const mesh::Mesh& mesh);
DiagnosticNumbers diagnostics(const scalar::ScalarCase& c, const mesh::Mesh& mesh);

/// Local value at one point: sqrt(lambda_max(A_i G_ij A_j) / (c_i kappa^2 G:G)).
double element_peclet(std::span<const CMatrix> a, const SpatialMatrix& g, double kappa, double c_i);

}  // namespace tsgls::verification
