#pragma once

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tsgls/field.hpp"
#include "tsgls/linalg/block_tangent.hpp"
#include "tsgls/linalg/gmres.hpp"
#include "tsgls/mesh/mesh.hpp"

namespace tsgls::ns {

/// Velocity modes per component at a boundary node.
using VectorData = std::function<std::vector<spectral::SpectralCoeffs>(int node, const Point& x)>;

/// Same modes at every node.
VectorData uniform_velocity(std::vector<spectral::SpectralCoeffs> modes);

/// Time-periodic incompressible flow problem. Every boundary facet group
/// must appear in exactly one of dirichlet, neumann and walls.
struct NSCase {
  double rho = 1.06;
  double mu = 0.04;
  double omega = 0.0;
  int n_modes = 1;
  std::map<std::string, VectorData> dirichlet;
  /// Scalar traction h, applied as h n_i.
  std::map<std::string, SpatialSpectral> neumann;
  std::vector<std::string> walls;
  /// 0 selects the element default.
  double c_i = 0.0;
  double backflow_beta = 0.0;

  double nu() const { return mu / rho; }
};

/// Throws InvalidInput with every problem found.
void validate_case(const NSCase& c, const mesh::Mesh& mesh);

struct NSState {
  int dim = 1;
  int n_modes = 1;
  std::vector<SpectralField> velocity;  // one field per direction
  SpectralField pressure;

  static NSState zero(const mesh::Mesh& mesh, int n_modes);
  linalg::RealLayout layout() const;
  /// Complex vector in layout order (velocity components then pressure).
  CVector pack() const;
  void unpack(const CVector& x);
};

/// Velocity of a state in the per-node layout used by the assembly helpers.
VelocityField velocity_field(const NSState& s);

/// Prescribed velocity per Dirichlet node; wall nodes win over inflow data.
std::map<int, std::vector<spectral::SpectralCoeffs>> dirichlet_values(const NSCase& c,
                                                                      const mesh::Mesh& mesh);

/// Zero interior velocity and pressure, Dirichlet data on boundary nodes.
NSState initial_state(const NSCase& c, const mesh::Mesh& mesh);

struct AssemblyOptions {
  Execution exec = Execution::parallel;
  /// Evaluate convection matrices, tau and the backflow matrix from this
  /// state instead of the current one (frozen-coefficient linearization).
  const NSState* frozen = nullptr;
};

/// Momentum and continuity residuals in complex layout order. Momentum
/// rows of Dirichlet nodes are assembled but ignored by the solver.
CVector assemble_ns_residual(const NSCase& c, const mesh::Mesh& mesh, const NSState& state,
                             const AssemblyOptions& options = {});

/// Real residual with constrained rows zeroed.
RVector constrained_residual(const CVector& r, const linalg::BlockTangent& tangent);

/// Frozen-coefficient tangent. A finite pseudo_dt adds the consistent mass
/// c1 rho / pseudo_dt to K. With full_coupling the least-squares parts of
/// the gradient and divergence blocks are kept.
linalg::BlockTangent assemble_ns_tangent(const NSCase& c, const mesh::Mesh& mesh,
                                         const NSState& state, double pseudo_dt,
                                         double c1 = 1.5, bool full_coupling = false,
                                         Execution exec = Execution::parallel);

enum class LinearSolver { gmres, direct };

struct SolverConfig {
  double eps_nr = 1e-3;
  double eps_ls = 0.05;
  int krylov_dim = 100;
  long max_linear_iters = std::numeric_limits<long>::max() / 4;
  /// 0 selects default_pseudo_dt; infinity gives plain Newton.
  double pseudo_dt = 0.0;
  int max_steps = 200;
  double c1 = 1.5;
  LinearSolver linear_solver = LinearSolver::gmres;
  /// Keep the least-squares parts of the gradient and divergence blocks.
  bool full_tangent = false;
  Execution exec = Execution::parallel;

  void validate() const;
};

/// Ten times a physical step of one hundredth of the period; infinite for a
/// steady case.
double default_pseudo_dt(const NSCase& c);

struct StepResult {
  NSState state;
  double residual_norm = 0.0;  // at the new state
  bool accepted = true;
  long linear_iterations = 0;
  double linear_residual = 0.0;
};

/// One linearized solve y <- y - H^{-1} r. The step is rejected (state
/// returned unchanged) when the linear solver makes no progress.
StepResult newton_step(const NSCase& c, const mesh::Mesh& mesh, const NSState& state,
                       const SolverConfig& config);

struct SolveResult {
  NSState state;
  bool converged = false;
  int steps = 0;
  std::vector<double> residual_history;  // entry 0 is the initial residual
  long linear_iterations = 0;
};

SolveResult solve_ns(const NSCase& c, const mesh::Mesh& mesh, const SolverConfig& config = {});
/// Continue from a given state (Dirichlet values are reimposed).
SolveResult solve_ns(const NSCase& c, const mesh::Mesh& mesh, const SolverConfig& config,
                     NSState start);

/// 1/2 rho beta |A_n|_- for a normal convection matrix.
CMatrix backflow_matrix(const CMatrix& a_n, double rho, double beta);

/// Backflow matrix of a facet with the velocity at its centroid.
CMatrix backflow_surface_matrix(const NSState& state, const mesh::Mesh& mesh,
                                const mesh::Facet& facet, double rho, double beta);

struct GroupFlow {
  spectral::SpectralCoeffs flow;      // integral of u . n (outward)
  spectral::SpectralCoeffs pressure;  // area average
  double area = 0.0;
};

using FlowReport = std::map<std::string, GroupFlow>;

FlowReport flow_report(const NSState& state, const mesh::Mesh& mesh,
                       const std::vector<std::string>& groups);

/// Developed inflow profile on a (near-)planar facet group carrying flow
/// rate q into the domain per mode. The shape solves a unit Poisson problem
/// on the group with zero rim values, which is the parabola on a segment or
/// a disk. Logs a warning when the group is not planar.
VectorData parabolic_inflow(const mesh::Mesh& mesh, const std::string& group,
                            const spectral::SpectralCoeffs& q);

}  // namespace tsgls::ns
