#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsgls/mesh/mesh.hpp"
#include "tsgls/ns/ns_solver.hpp"
#include "tsgls/scalar/scalar_solver.hpp"
#include "tsgls/spectral/coeffs.hpp"
#include "tsgls/time/time_solver.hpp"
#include "tsgls/verification/verification.hpp"

namespace tsgls::cli {

using json = nlohmann::json;

/// Every problem found while reading or checking a config, one per line.
class ConfigError : public InvalidInput {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Periodic data given either as Fourier modes n = 0, 1, ... or as uniform
/// samples over one period starting at t = 0.
struct PeriodicData {
  std::vector<cplx> modes;
  std::vector<double> samples;

  bool empty() const { return modes.empty() && samples.empty(); }
  /// Modes 0..n_modes-1; samples go through fourier_coefficients. Extra
  /// modes beyond n_modes are dropped.
  spectral::SpectralCoeffs coefficients(int n_modes) const;
  /// Relative truncation error of the samples for n_modes (0 for modes).
  double truncation_error(int n_modes) const;
  /// Value at time t for a period: mode sums, or periodic linear
  /// interpolation of the samples.
  double value(double t, double omega, double period) const;
};

enum class BcKind { wall, dirichlet, neumann, exact };

struct BoundaryConfig {
  BcKind kind = BcKind::wall;
  /// Flow Dirichlet profile: "parabolic" (data is the flow rate into the
  /// domain) or "uniform" (data scales `direction`).
  std::string profile = "uniform";
  std::array<double, 3> direction{1.0, 0.0, 0.0};
  PeriodicData data;
};

struct PhysicsConfig {
  std::string problem = "flow";  // "flow" or "scalar"
  double rho = 1.06;
  double mu = 0.04;
  double kappa = 0.0377;
  double omega = 0.0;
  /// Period for steady data; 2 pi / omega otherwise.
  double period = 1.0;
  int n_modes = 1;
  double c_i = 0.0;
  double backflow_beta = 0.0;
  /// Scalar problems: uniform advecting velocity, direction times modes.
  std::array<double, 3> velocity_direction{1.0, 0.0, 0.0};
  PeriodicData velocity;
  bool galerkin_only = false;

  double time_period() const;
};

struct MeshConfig {
  std::string generator = "rectangle";  // interval, rectangle, box, branching_box, file
  std::string file;
  std::vector<double> origin;
  std::vector<double> extents{1.0, 1.0};
  std::vector<int> resolution{8, 8};
  /// branching_box parameters.
  double width = 1.0;
  double length = 4.0;
  double branch_length = 2.0;
  int n_width = 3;
};

struct TimeConfig {
  int steps_per_cycle = 100;
  int n_cycles = 3;
  double rho_inf = 0.2;
  int max_newton = 10;
  double eps_nr = 1e-3;
  int ramp_steps = 10;
};

struct SolverBlock {
  std::string method = "spectral";  // "spectral" or "time"
  double eps_nr = 1e-3;
  double eps_ls = 0.05;
  int krylov_dim = 100;
  int max_steps = 200;
  double pseudo_dt = 0.0;
  double c1 = 1.5;
  std::string linear_solver = "gmres";  // "gmres" or "direct"
  bool full_tangent = false;
  TimeConfig time;
};

struct OutputConfig {
  std::string directory = "output";
  /// summary.json is always written; these add traces and fields.
  std::vector<std::string> formats{"csv"};  // csv, vtk
  int field_samples = 4;    // VTK files over one period
  int trace_samples = 64;   // CSV rows over one period (spectral runs)
  std::vector<std::string> groups;  // empty: every non-wall group
};

/// Optional closed-form reference: "poiseuille", "oscillatory_channel",
/// "manufactured" or "inflow".
struct OracleConfig {
  std::string type;
  json params = json::object();
};

struct CaseConfig {
  PhysicsConfig physics;
  MeshConfig mesh;
  std::map<std::string, BoundaryConfig> boundary;
  SolverBlock solver;
  OutputConfig outputs;
  OracleConfig oracle;
};

/// Parse and check the structure of a config; every problem is reported in
/// one ConfigError. Unknown keys are errors.
CaseConfig parse_config(const json& j);
CaseConfig parse_config_text(const std::string& text);
CaseConfig load_config(const std::string& path);

/// Normalized form with every default written out.
json to_json(const CaseConfig& c);

mesh::Mesh build_mesh(const CaseConfig& c);
/// Problems that need the mesh: facet groups referenced but missing, or
/// boundary groups without a condition.
std::vector<std::string> check_against_mesh(const CaseConfig& c, const mesh::Mesh& mesh);

ns::NSCase build_flow_case(const CaseConfig& c, const mesh::Mesh& mesh);
transient::TimeCase build_time_case(const CaseConfig& c, const mesh::Mesh& mesh);
scalar::ScalarCase build_scalar_case(const CaseConfig& c, const mesh::Mesh& mesh);

struct GroupTrace {
  spectral::SpectralCoeffs flow;
  spectral::SpectralCoeffs pressure;
};

struct RunSummary {
  bool converged = false;
  int steps = 0;
  std::vector<double> residual_history;
  double wall_time = 0.0;
  verification::DiagnosticNumbers diagnostics;
  std::map<std::string, GroupTrace> flow;  // spectral flow runs
  std::map<std::string, double> truncation_error;
  std::map<std::string, double> errors;  // oracle comparisons
  double h = 0.0;                        // largest element size
  std::string method;
  /// Time runs: relative flow change between consecutive cycles.
  std::map<std::string, std::vector<double>> cycle_change;
  int unconverged_steps = 0;
  /// Scalar runs: smallest and largest nodal value over trace_samples
  /// instants of one period.
  std::optional<std::pair<double, double>> field_range;

  json to_json() const;
};

struct RunOptions {
  std::optional<std::string> output_dir;
  bool serial = false;
  bool write_outputs = true;
};

/// Validate, solve and write outputs. Throws ConfigError for invalid
/// input; an unwritable output directory is reported before solving.
RunSummary run_case(const CaseConfig& c, const RunOptions& options = {});

struct SweepPoint {
  json value;
  bool ok = false;
  std::string failure;
  RunSummary summary;
};

struct SweepResult {
  std::string parameter;
  std::string metric;
  std::vector<SweepPoint> points;
  /// Order table, filled when every point succeeded with the metric and
  /// the element size strictly decreases along the sweep.
  std::optional<verification::ErrorReport> report;

  json to_json() const;
};

/// Study: {"base": config or path, "parameter": JSON pointer,
/// "values": [...], "metric": error name, "output": directory}. Needs two
/// or more values. Failing points are recorded and the sweep continues.
SweepResult run_sweep(const json& study, const RunOptions& options = {});

/// Field export: VTK files at `samples` instants over one period.
void export_flow_fields(const ns::NSState& s, const mesh::Mesh& mesh, double omega, double period,
                        int samples, const std::string& dir);
void export_scalar_fields(const SpectralField& f, const mesh::Mesh& mesh, double omega,
                          double period, int samples, const std::string& dir);
/// CSV with columns t, Q_<group>, P_<group> at `samples` instants.
std::string format_flow_trace(const std::map<std::string, GroupTrace>& groups, double omega,
                              double period, int samples);
/// VTK files from `samples` evenly spaced states of a stored cycle.
void export_time_fields(const std::vector<transient::TimeState>& states, const mesh::Mesh& mesh,
                        int samples, const std::string& dir);
/// CSV of a time-domain run, one row per step.
std::string format_time_trace(const transient::TimeRun& run);
/// CSV with columns step, residual.
std::string format_convergence(const std::vector<double>& history);
void write_text(const std::string& path, const std::string& text);

/// Throws if the directory cannot be created or written.
void ensure_writable_directory(const std::string& dir);

}  // namespace tsgls::cli
