#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "tsgls/mesh/mesh.hpp"
#include "tsgls/ns/ns_solver.hpp"
#include "tsgls/types.hpp"

namespace tsgls::transient {

/// Velocity components at a boundary node and time.
using TimeVectorData = std::function<std::vector<double>(int node, const Point& x, double t)>;
/// Scalar traction h(x, t), applied as h n_i.
using TimeScalarData = std::function<double(const Point& x, double t)>;

/// Flow problem integrated in time over n_cycles periods. Boundary data is
/// expected to be periodic with the given period.
struct TimeCase {
  double rho = 1.06;
  double mu = 0.04;
  std::map<std::string, TimeVectorData> dirichlet;
  std::map<std::string, TimeScalarData> neumann;
  std::vector<std::string> walls;
  double c_i = 0.0;  // 0 selects the element default
  double backflow_beta = 0.0;
  double period = 1.0;
  int n_cycles = 3;
  int steps_per_cycle = 100;

  double nu() const { return mu / rho; }
  double dt() const { return period / steps_per_cycle; }
};

void validate_case(const TimeCase& c, const mesh::Mesh& mesh);

/// Time-domain counterpart of a spectral case: boundary modes are summed in
/// time. A steady spectral case needs an explicit period.
TimeCase time_case_from(const ns::NSCase& c, int steps_per_cycle, int n_cycles,
                        double period = 0.0);

/// Generalized-alpha parameters for first-order systems.
struct GenAlphaConfig {
  double rho_inf = 0.2;

  double alpha_m() const { return 0.5 * (3.0 - rho_inf) / (1.0 + rho_inf); }
  double alpha_f() const { return 1.0 / (1.0 + rho_inf); }
  double gamma() const { return 0.5 + alpha_m() - alpha_f(); }
  void validate() const;
};

struct TimeSolverConfig {
  GenAlphaConfig alpha;
  /// Newton stops when the free residual drops by eps_nr relative to the
  /// predictor residual or below abs_tol.
  double eps_nr = 1e-3;
  double abs_tol = 1e-12;
  int max_newton = 10;
  /// Dirichlet data is scaled linearly from zero over this many steps.
  int ramp_steps = 10;
  bool use_omega_hat = true;
  Execution exec = Execution::parallel;

  void validate() const;
};

struct TimeState {
  int dim = 1;
  double t = 0.0;
  std::vector<RVector> velocity;      // per direction, nodal
  std::vector<RVector> acceleration;  // per direction, nodal
  RVector pressure;

  static TimeState zero(const mesh::Mesh& mesh);
};

/// tau = [omega_hat^2 + u G u + c_i nu^2 G:G]^{-1/2}.
double time_tau(std::span<const double> u, double omega_hat, const SpatialMatrix& g, double nu,
                double c_i);

/// ||du/dt|| / ||u|| with domain L2 norms; zero when u vanishes.
double omega_hat(const mesh::Mesh& mesh, const std::vector<RVector>& velocity,
                 const std::vector<RVector>& acceleration);

struct StepOutcome {
  TimeState state;
  bool converged = false;
  int newton_iterations = 0;
  std::vector<double> residual_history;  // entry 0 is the predictor residual
  double omega_hat = 0.0;
};

/// Implicit generalized-alpha stepper with Newton sub-iterations. The
/// unknowns are the nodal accelerations and pressures at the new time. The
/// sparse pattern and the symbolic factorization are reused across steps.
class TimeStepper {
 public:
  TimeStepper(TimeCase c, const mesh::Mesh& mesh, TimeSolverConfig config);
  ~TimeStepper();
  TimeStepper(const TimeStepper&) = delete;
  TimeStepper& operator=(const TimeStepper&) = delete;

  /// Advance by one step; `ramp` scales the Dirichlet data.
  StepOutcome step(const TimeState& state, double ramp = 1.0);

  /// Residual and Jacobian of the step equations at an iterate (the new
  /// state), for a fixed omega_hat. Rows of Dirichlet velocity dofs are
  /// zero in the residual and identity in the Jacobian.
  RVector residual(const TimeState& previous, const TimeState& iterate, double omega_hat) const;
  Eigen::SparseMatrix<double> jacobian(const TimeState& previous, const TimeState& iterate,
                                       double omega_hat) const;

  /// Dof index of (node, comp), comp = dim for pressure.
  int dof(int node, int comp) const { return node * (dim_ + 1) + comp; }
  int n_dofs() const { return mesh_->n_nodes() * (dim_ + 1); }
  const std::map<int, int>& dirichlet_nodes() const { return dirichlet_owner_; }

  /// Iterate consistent with the predictor and the Dirichlet data at t + dt.
  TimeState predict(const TimeState& state, double ramp) const;
  /// Apply an acceleration/pressure increment to an iterate.
  void update(TimeState& iterate, const RVector& delta) const;

 private:
  struct Impl;
  TimeCase case_;
  const mesh::Mesh* mesh_;
  TimeSolverConfig config_;
  int dim_;
  std::map<int, int> dirichlet_owner_;  // node -> index into dirichlet groups (-1 wall)
  std::vector<std::string> dirichlet_groups_;
  std::unique_ptr<Impl> impl_;

  void assemble(const TimeState& previous, const TimeState& iterate, double omega_hat,
                RVector* r, Eigen::SparseMatrix<double>* j) const;
  std::vector<double> dirichlet_value(int node, double t) const;
  double free_norm(const RVector& r) const;
};

/// One step from scratch (builds a stepper).
StepOutcome generalized_alpha_step(const TimeCase& c, const mesh::Mesh& mesh,
                                   const TimeState& state, const TimeSolverConfig& config = {});

struct TimeRunOptions {
  /// Facet groups whose flow and mean pressure are traced.
  std::vector<std::string> report_groups;
  /// Keep the nodal states of the last cycle.
  bool keep_last_cycle = false;
};

struct TimeRun {
  std::vector<double> times;                          // every step, starting at t = 0
  std::map<std::string, std::vector<double>> flow;      // outward u . n per group
  std::map<std::string, std::vector<double>> pressure;  // area mean per group
  /// Relative L2 change of each group's flow trace between consecutive
  /// cycles, entry k compares cycle k + 2 with cycle k + 1.
  std::map<std::string, std::vector<double>> cycle_change;
  std::vector<TimeState> last_cycle;
  int unconverged_steps = 0;
  int steps_per_cycle = 0;

  /// Samples t = (n_cycles - 1) T + k dt, k = 0 .. steps_per_cycle - 1.
  std::vector<double> last_cycle_flow(const std::string& group) const;
  std::vector<double> last_cycle_pressure(const std::string& group) const;
};

/// Outward flow and mean pressure of a group for a nodal state.
std::pair<double, double> group_flow(const TimeState& state, const mesh::Mesh& mesh,
                                     const std::string& group);

TimeRun run_time_simulation(const TimeCase& c, const mesh::Mesh& mesh,
                            const TimeSolverConfig& config = {},
                            const TimeRunOptions& options = {});

}  // namespace tsgls::transient
