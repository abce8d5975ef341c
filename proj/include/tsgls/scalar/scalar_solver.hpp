#pragma once

#include <map>
#include <string>
#include <vector>

#include "tsgls/field.hpp"
#include "tsgls/linalg/gmres.hpp"
#include "tsgls/linalg/real_map.hpp"
#include "tsgls/mesh/mesh.hpp"

namespace tsgls::scalar {

/// Time-periodic convection-diffusion problem in spectral form. Boundary
/// groups absent from both maps are natural boundaries with h = 0.
struct ScalarCase {
  double kappa = 0.0377;
  double omega = 0.0;
  int n_modes = 1;
  /// Prescribed velocity; empty means zero velocity.
  VelocityField velocity;
  std::map<std::string, SpatialSpectral> dirichlet;
  std::map<std::string, SpatialSpectral> neumann;
  /// 0 selects the element default.
  double c_i = 0.0;
  double backflow_beta = 0.0;
  /// Optional volumetric source per mode.
  SpatialSpectral source;
  /// Drop the least-squares terms (plain Galerkin).
  bool galerkin_only = false;
};

/// Constant-in-space boundary or source data.
SpatialSpectral constant_data(const spectral::SpectralCoeffs& c);

/// Throws InvalidInput listing the first violated precondition.
void validate_case(const ScalarCase& c, const mesh::Mesh& mesh);

struct ScalarSystem {
  linalg::ComplexBlockSystem system;
  std::vector<int> dirichlet_nodes;
  /// Prescribed values, meaningful at Dirichlet nodes only.
  SpectralField dirichlet_values;
};

/// Complex node-block system b(w, phi) = l(w) without Dirichlet rows
/// applied.
ScalarSystem assemble_scalar(const ScalarCase& c, const mesh::Mesh& mesh,
                             Execution exec = Execution::parallel);

enum class LinearSolverKind { gmres, direct };

struct ScalarSolveOptions {
  LinearSolverKind solver = LinearSolverKind::gmres;
  linalg::GmresConfig gmres{100, 1e-10, 20000};
  Execution exec = Execution::parallel;
};

struct ScalarSolution {
  SpectralField field;
  bool converged = false;
  long iterations = 0;
  double relative_residual = 0.0;
};

/// Solves with Dirichlet values imposed exactly; non-convergence is
/// reported in the result and logged.
ScalarSolution solve_scalar(const ScalarCase& c, const mesh::Mesh& mesh,
                            const ScalarSolveOptions& options = {});

/// Energy-norm pieces of a trial field w that vanishes on Dirichlet nodes.
struct CoercivityComponents {
  double boundary = 0.0;       // 1/2 |w|^2_{A_n, natural boundary}
  double diffusive = 0.0;      // kappa ||grad w||^2
  double least_squares = 0.0;  // ||R(w)||^2_tau
  double re_b = 0.0;           // Re b(w, w) from the assembled operator
  double im_b = 0.0;

  double total() const { return boundary + diffusive + least_squares; }
};

/// Throws InvalidInput when w is nonzero on a Dirichlet node or when any
/// natural-boundary facet sees inflow (A_n not positive semi-definite).
CoercivityComponents coercivity_probe(const ScalarCase& c, const mesh::Mesh& mesh,
                                      const SpectralField& w);

/// Value of the solution at time t at every node.
std::vector<double> reconstruct_in_time(const SpectralField& f, double omega, double t);

}  // namespace tsgls::scalar
