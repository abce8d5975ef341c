#include <algorithm>
#include <chrono>
#include <numbers>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <spdlog/spdlog.h>

#include "tsgls/cli/cli.hpp"

namespace tsgls::cli {

namespace fs = std::filesystem;

namespace {

json coeffs_json(const spectral::SpectralCoeffs& c) {
  json a = json::array();
  for (int n = 0; n < c.n_modes(); ++n) a.push_back({c[n].real(), c[n].imag()});
  return a;
}

bool wants(const CaseConfig& c, const std::string& format) {
  for (const auto& f : c.outputs.formats) {
    if (f == format) return true;
  }
  return false;
}

std::vector<std::string> report_groups(const CaseConfig& c) {
  if (!c.outputs.groups.empty()) return c.outputs.groups;
  std::vector<std::string> g;
  for (const auto& [name, b] : c.boundary) {
    if (b.kind != BcKind::wall) g.push_back(name);
  }
  return g;
}

// Channel oracles: axial component along `axis`, distance from the
// centerline measured along `cross_axis`.
struct ChannelGeometry {
  int axis = 0;
  int cross = 1;
  double center = 0.5;
  double half_width = 0.5;
};

ChannelGeometry channel_geometry(const json& p) {
  ChannelGeometry g;
  g.axis = p.value("axis", 0);
  g.cross = p.value("cross_axis", 1);
  g.center = p.value("center", 0.5);
  g.half_width = p.value("half_width", 0.5);
  return g;
}

std::vector<cplx> modes_of(const json& a) {
  std::vector<cplx> out;
  for (const auto& e : a) {
    if (e.is_array()) {
      out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    } else {
      out.emplace_back(e.get<double>(), 0.0);
    }
  }
  return out;
}

// Relative L2 error of a velocity field against an axial profile.
void channel_errors(const std::vector<SpectralField>& velocity, const mesh::Mesh& mesh,
                    const ChannelGeometry& g, const std::function<spectral::SpectralCoeffs(double)>& u,
                    int n_modes, RunSummary& sum) {
  const SpatialSpectral exact = [&](const Point& x) { return u(x[g.cross] - g.center); };
  const auto modes = verification::l2_error_modes(velocity[g.axis], exact, mesh);
  double worst = 0.0;
  for (int n = 0; n < n_modes; ++n) {
    sum.errors["velocity_mode_" + std::to_string(n)] = modes.relative(n);
    worst = std::max(worst, modes.relative(n));
  }
  // Cross-stream velocity should vanish; report it relative to the axial norm.
  const SpatialSpectral zero = [n_modes](const Point&) { return spectral::SpectralCoeffs(n_modes); };
  const double norm = verification::l2_norm(exact, n_modes, mesh);
  const double axial = verification::l2_error(velocity[g.axis], exact, mesh);
  const double cross = verification::l2_error(velocity[g.cross], zero, mesh);
  sum.errors["velocity_mode_max"] = worst;
  sum.errors["velocity"] = std::sqrt(axial * axial + cross * cross) / norm;
}

void flow_oracle(const CaseConfig& c, const std::vector<SpectralField>& velocity,
                 const mesh::Mesh& mesh, RunSummary& sum) {
  const auto& p = c.oracle.params;
  const int n = c.physics.n_modes;
  const auto g = channel_geometry(p);
  if (c.oracle.type == "poiseuille") {
    const double q = p.value("flow_rate", 1.0);
    const double peak = 1.5 * q / (2.0 * g.half_width);
    const double a = g.half_width;
    channel_errors(velocity, mesh, g,
                   [peak, a, n](double y) {
                     spectral::SpectralCoeffs s(n);
                     s.set(0, peak * (1.0 - (y * y) / (a * a)));
                     return s;
                   },
                   n, sum);
  } else if (c.oracle.type == "oscillatory_channel") {
    PeriodicData grad;
    grad.modes = modes_of(p.value("pressure_gradient", json::array()));
    const auto u = verification::oscillatory_channel_exact(grad.coefficients(n), c.physics.rho,
                                                           c.physics.mu, c.physics.omega,
                                                           g.half_width);
    channel_errors(velocity, mesh, g, u, n, sum);
  }
}

// Total outflow against the full inflow signal over one period.
void inflow_oracle(const CaseConfig& c, const std::vector<double>& times,
                   const std::vector<double>& outflow, RunSummary& sum) {
  const auto inlet = c.oracle.params.at("inlet").get<std::string>();
  const auto& data = c.boundary.at(inlet).data;
  const double period = c.physics.time_period();
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double q_in = data.value(times[k], c.physics.omega, period);
    const double d = outflow[k] - q_in;
    diff += d * d;
    ref += q_in * q_in;
  }
  sum.errors["flow"] = ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

std::vector<double> oracle_times(const CaseConfig& c) {
  const auto inlet = c.oracle.params.at("inlet").get<std::string>();
  const auto& data = c.boundary.at(inlet).data;
  const auto count = data.samples.empty() ? 256 : static_cast<int>(data.samples.size());
  std::vector<double> t(count);
  for (int k = 0; k < count; ++k) t[k] = c.physics.time_period() * k / count;
  return t;
}

std::vector<std::string> outlet_groups(const CaseConfig& c) {
  const auto inlet = c.oracle.params.at("inlet").get<std::string>();
  std::vector<std::string> g;
  for (const auto& [name, b] : c.boundary) {
    if (b.kind != BcKind::wall && name != inlet) g.push_back(name);
  }
  return g;
}

void run_spectral(const CaseConfig& c, const mesh::Mesh& mesh, Execution exec,
                  const std::optional<std::string>& dir, RunSummary& sum) {
  const auto nc = build_flow_case(c, mesh);
  ns::SolverConfig cfg;
  const auto& s = c.solver;
  cfg.eps_nr = s.eps_nr;
  cfg.eps_ls = s.eps_ls;
  cfg.krylov_dim = s.krylov_dim;
  cfg.max_steps = s.max_steps;
  cfg.pseudo_dt = s.pseudo_dt;
  cfg.c1 = s.c1;
  cfg.linear_solver = s.linear_solver == "direct" ? ns::LinearSolver::direct : ns::LinearSolver::gmres;
  cfg.full_tangent = s.full_tangent;
  cfg.exec = exec;
  const auto sol = ns::solve_ns(nc, mesh, cfg);
  sum.converged = sol.converged;
  sum.steps = sol.steps;
  sum.residual_history = sol.residual_history;

  const double c_i = nc.c_i > 0.0 ? nc.c_i : mesh::default_c_i(mesh.type());
  sum.diagnostics = verification::diagnostics(ns::velocity_field(sol.state), nc.nu(), nc.omega,
                                              nc.n_modes, c_i, mesh);
  const auto groups = report_groups(c);
  for (const auto& [g, f] : ns::flow_report(sol.state, mesh, groups)) {
    sum.flow[g] = GroupTrace{f.flow, f.pressure};
  }
  if (c.oracle.type == "inflow") {
    const auto report = ns::flow_report(sol.state, mesh, outlet_groups(c));
    const auto times = oracle_times(c);
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (const auto& [g, f] : report) {
        out[k] += spectral::evaluate_in_time(f.flow, c.physics.omega, times[k]);
      }
    }
    inflow_oracle(c, times, out, sum);
  } else {
    flow_oracle(c, sol.state.velocity, mesh, sum);
  }

  if (!dir) return;
  const double period = c.physics.time_period();
  if (wants(c, "csv")) {
    write_text((fs::path(*dir) / "trace.csv").string(),
               format_flow_trace(sum.flow, c.physics.omega, period, c.outputs.trace_samples));
    write_text((fs::path(*dir) / "convergence.csv").string(),
               format_convergence(sum.residual_history));
  }
  if (wants(c, "vtk")) {
    export_flow_fields(sol.state, mesh, c.physics.omega, period, c.outputs.field_samples, *dir);
  }
}

// Per-node Fourier modes of one velocity component over a stored cycle.
SpectralField cycle_modes(const std::vector<transient::TimeState>& cycle, int comp, int n_modes) {
  const int n_nodes = static_cast<int>(cycle.front().pressure.size());
  SpectralField f(n_nodes, spectral::SpectralCoeffs(n_modes));
  std::vector<double> trace(cycle.size());
  for (int node = 0; node < n_nodes; ++node) {
    for (std::size_t k = 0; k < cycle.size(); ++k) trace[k] = cycle[k].velocity[comp][node];
    f[node] = spectral::fourier_coefficients(trace, n_modes);
  }
  return f;
}

void run_time(const CaseConfig& c, const mesh::Mesh& mesh, Execution exec,
              const std::optional<std::string>& dir, RunSummary& sum) {
  const auto tc = build_time_case(c, mesh);
  transient::TimeSolverConfig cfg;
  const auto& t = c.solver.time;
  cfg.alpha.rho_inf = t.rho_inf;
  cfg.eps_nr = t.eps_nr;
  cfg.max_newton = t.max_newton;
  cfg.ramp_steps = t.ramp_steps;
  cfg.exec = exec;
  const bool channel = c.oracle.type == "poiseuille" || c.oracle.type == "oscillatory_channel";
  transient::TimeRunOptions opts;
  opts.report_groups = report_groups(c);
  if (c.oracle.type == "inflow") {
    for (const auto& g : outlet_groups(c)) {
      if (std::find(opts.report_groups.begin(), opts.report_groups.end(), g) ==
          opts.report_groups.end()) {
        opts.report_groups.push_back(g);
      }
    }
  }
  opts.keep_last_cycle = channel || (dir && wants(c, "vtk"));
  const auto run = transient::run_time_simulation(tc, mesh, cfg, opts);
  sum.steps = static_cast<int>(run.times.size()) - 1;
  sum.unconverged_steps = run.unconverged_steps;
  sum.converged = run.unconverged_steps == 0;
  sum.cycle_change = run.cycle_change;

  const int n = c.physics.n_modes;
  const int spc = tc.steps_per_cycle;
  if (spc >= 2 * (2 * n - 1)) {
    for (const auto& g : report_groups(c)) {
      sum.flow[g] = GroupTrace{spectral::fourier_coefficients(run.last_cycle_flow(g), n),
                               spectral::fourier_coefficients(run.last_cycle_pressure(g), n)};
    }
  }
  if (c.oracle.type == "inflow") {
    // Last-cycle samples sit at t = k dt modulo the period.
    std::vector<double> times(spc);
    for (int k = 0; k < spc; ++k) times[k] = k * tc.dt();
    std::vector<double> out(spc, 0.0);
    for (const auto& g : outlet_groups(c)) {
      const auto tr = run.last_cycle_flow(g);
      for (int k = 0; k < spc; ++k) out[k] += tr[k];
    }
    inflow_oracle(c, times, out, sum);
  } else if (channel) {
    if (spc < 2 * (2 * n - 1)) {
      throw ConfigError({"solver.time: steps_per_cycle too small for the oracle modes"});
    }
    std::vector<SpectralField> velocity;
    for (int i = 0; i < mesh.dim; ++i) velocity.push_back(cycle_modes(run.last_cycle, i, n));
    flow_oracle(c, velocity, mesh, sum);
  }

  if (!dir) return;
  if (wants(c, "csv")) write_text((fs::path(*dir) / "trace.csv").string(), format_time_trace(run));
  if (wants(c, "vtk")) export_time_fields(run.last_cycle, mesh, c.outputs.field_samples, *dir);
}

void run_scalar(const CaseConfig& c, const mesh::Mesh& mesh, Execution exec,
                const std::optional<std::string>& dir, RunSummary& sum) {
  const auto sc = build_scalar_case(c, mesh);
  scalar::ScalarSolveOptions opts;
  opts.solver = c.solver.linear_solver == "direct" ? scalar::LinearSolverKind::direct
                                                   : scalar::LinearSolverKind::gmres;
  opts.gmres.restart = c.solver.krylov_dim;
  opts.exec = exec;
  const auto sol = scalar::solve_scalar(sc, mesh, opts);
  sum.converged = sol.converged;
  sum.steps = static_cast<int>(sol.iterations);
  sum.residual_history = {sol.relative_residual};
  sum.diagnostics = verification::diagnostics(sc, mesh);
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const int samples = c.outputs.trace_samples;
    for (int k = 0; k < samples; ++k) {
      const double t = c.physics.time_period() * k / samples;
      for (double v : scalar::reconstruct_in_time(sol.field, c.physics.omega, t)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    sum.field_range = {lo, hi};
  }

  if (c.oracle.type == "manufactured") {
    // Rebuilding the case is cheap and keeps the exact field in one place.
    const auto& p = c.oracle.params;
    const int n = c.physics.n_modes;
    std::vector<spectral::SpectralCoeffs> vel;
    for (int i = 0; i < mesh.dim; ++i) {
      vel.push_back(c.physics.velocity_direction[i] * c.physics.velocity.coefficients(n));
    }
    PeriodicData amp;
    amp.modes = modes_of(p.at("amplitudes"));
    const auto mms = verification::manufactured_sine(
        mesh.dim, vel, c.physics.kappa, c.physics.omega, amp.coefficients(n),
        p.value("wavenumber", std::numbers::pi), p.value("shift", 0.3));
    const double err = verification::l2_error(sol.field, mms.exact, mesh);
    sum.errors["l2_abs"] = err;
    sum.errors["l2"] = err / verification::l2_norm(mms.exact, n, mesh);
  }

  if (!dir) return;
  if (wants(c, "csv")) {
    std::ostringstream out;
    out << "node,x,y,z";
    for (int k = 0; k < c.physics.n_modes; ++k) out << ",re_" << k << ",im_" << k;
    out << '\n';
    std::string text = out.str();
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      const auto& x = mesh.coords[node];
      text += fmt::format("{},{:.17g},{:.17g},{:.17g}", node, x[0], x[1], x[2]);
      for (int k = 0; k < c.physics.n_modes; ++k) {
        text += fmt::format(",{:.17g},{:.17g}", sol.field[node][k].real(), sol.field[node][k].imag());
      }
      text += '\n';
    }
    write_text((fs::path(*dir) / "field.csv").string(), text);
  }
  if (wants(c, "vtk")) {
    export_scalar_fields(sol.field, mesh, c.physics.omega, c.physics.time_period(),
                         c.outputs.field_samples, *dir);
  }
}

}  // namespace

json RunSummary::to_json() const {
  json j;
  j["converged"] = converged;
  j["method"] = method;
  j["steps"] = steps;
  j["residual_history"] = residual_history;
  j["wall_time"] = wall_time;
  j["h"] = h;
  j["diagnostics"] = {{"alpha_e_min", diagnostics.alpha_e_min},
                      {"alpha", diagnostics.alpha},
                      {"beta", diagnostics.beta}};
  j["flow"] = json::object();
  for (const auto& [g, tr] : flow) {
    j["flow"][g] = {{"flow", coeffs_json(tr.flow)}, {"pressure", coeffs_json(tr.pressure)}};
  }
  j["truncation_error"] = truncation_error;
  j["errors"] = errors;
  if (field_range) j["field_range"] = {field_range->first, field_range->second};
  if (method == "time") {
    j["cycle_change"] = cycle_change;
    j["unconverged_steps"] = unconverged_steps;
  }
  return j;
}

RunSummary run_case(const CaseConfig& c, const RunOptions& options) {
  std::optional<std::string> dir;
  if (options.write_outputs) {
    dir = options.output_dir.value_or(c.outputs.directory);
    ensure_writable_directory(*dir);
  }
  const auto mesh = build_mesh(c);
  if (auto problems = check_against_mesh(c, mesh); !problems.empty()) throw ConfigError(problems);

  RunSummary sum;
  sum.h = mesh::max_element_size(mesh);
  sum.method = c.physics.problem == "scalar" ? "scalar" : c.solver.method;
  const int n = c.physics.n_modes;
  for (const auto& [name, b] : c.boundary) {
    if (b.data.samples.empty()) continue;
    sum.truncation_error[name] = b.data.truncation_error(n);
    spdlog::info("boundary '{}': {} modes leave a relative truncation error of {:.3e}", name, n,
                 sum.truncation_error[name]);
  }
  if (!c.physics.velocity.samples.empty()) {
    sum.truncation_error["velocity"] = c.physics.velocity.truncation_error(n);
  }

  const auto exec = options.serial ? Execution::serial : Execution::parallel;
  const auto start = std::chrono::steady_clock::now();
  if (sum.method == "scalar") {
    run_scalar(c, mesh, exec, dir, sum);
  } else if (sum.method == "time") {
    run_time(c, mesh, exec, dir, sum);
  } else {
    run_spectral(c, mesh, exec, dir, sum);
  }
  sum.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (dir) write_text((fs::path(*dir) / "summary.json").string(), sum.to_json().dump(2) + "\n");
  return sum;
}

json SweepResult::to_json() const {
  json j;
  j["parameter"] = parameter;
  j["metric"] = metric;
  j["points"] = json::array();
  for (const auto& p : points) {
    json e = {{"value", p.value}, {"ok", p.ok}};
    if (!p.failure.empty()) e["failure"] = p.failure;
    e["h"] = p.summary.h;
    if (const auto it = p.summary.errors.find(metric); it != p.summary.errors.end()) {
      e["metric"] = it->second;
    }
    e["converged"] = p.summary.converged;
    e["wall_time"] = p.summary.wall_time;
    j["points"].push_back(e);
  }
  if (report) {
    j["report"] = {{"h", report->h},
                   {"l2_error", report->l2_error},
                   {"observed_order", report->observed_order}};
  }
  return j;
}

SweepResult run_sweep(const json& study, const RunOptions& options) {
  std::vector<std::string> problems;
  if (!study.is_object()) throw ConfigError({"sweep: study must be an object"});
  for (const auto& [key, v] : study.items()) {
    if (key != "base" && key != "parameter" && key != "values" && key != "metric" &&
        key != "output") {
      problems.push_back("sweep: unknown key '" + key + "'");
    }
  }
  for (const char* key : {"base", "parameter", "values", "metric"}) {
    if (!study.contains(key)) problems.push_back(std::string("sweep: missing '") + key + "'");
  }
  if (!problems.empty()) throw ConfigError(problems);
  const auto& values = study.at("values");
  if (!values.is_array() || values.size() < 2) {
    throw ConfigError({"sweep: at least 2 values are required"});
  }

  const auto& base_json = study.at("base");
  const CaseConfig base =
      base_json.is_string() ? load_config(base_json.get<std::string>()) : parse_config(base_json);
  const json normalized = cli::to_json(base);

  SweepResult result;
  result.parameter = study.at("parameter").get<std::string>();
  result.metric = study.at("metric").get<std::string>();
  json::json_pointer ptr;
  try {
    ptr = json::json_pointer(result.parameter);
  } catch (const json::exception&) {
    throw ConfigError({"sweep: parameter must be a JSON pointer such as /physics/n_modes"});
  }
  if (!normalized.contains(ptr)) {
    throw ConfigError({"sweep: parameter '" + result.parameter + "' is not a config field"});
  }

  std::optional<std::string> dir;
  if (options.write_outputs) {
    dir = options.output_dir.value_or(study.value("output", std::string("sweep_output")));
    ensure_writable_directory(*dir);
  }

  for (std::size_t k = 0; k < values.size(); ++k) {
    SweepPoint point;
    point.value = values[k];
    try {
      json cfg = normalized;
      cfg[ptr] = values[k];
      RunOptions ro = options;
      if (dir) ro.output_dir = (fs::path(*dir) / fmt::format("point_{:02d}", k)).string();
      point.summary = run_case(parse_config(cfg), ro);
      if (!point.summary.converged) {
        point.failure = "not converged";
      } else if (!point.summary.errors.count(result.metric)) {
        point.failure = "metric '" + result.metric + "' not reported";
      } else {
        point.ok = true;
      }
    } catch (const std::exception& e) {
      point.failure = e.what();
    }
    if (!point.ok) spdlog::warn("sweep point {} failed: {}", k, point.failure);
    result.points.push_back(std::move(point));
  }

  bool complete = true;
  std::vector<double> hs, errs;
  for (const auto& p : result.points) {
    complete = complete && p.ok;
    if (p.ok) {
      hs.push_back(p.summary.h);
      errs.push_back(p.summary.errors.at(result.metric));
    }
  }
  bool decreasing = complete;
  for (std::size_t k = 1; k < hs.size(); ++k) decreasing = decreasing && hs[k] < hs[k - 1];
  if (decreasing) result.report = verification::make_error_report(hs, errs);

  if (dir) {
    write_text((fs::path(*dir) / "sweep.json").string(), result.to_json().dump(2) + "\n");
    std::string csv = "value,h," + result.metric + ",ok\n";
    for (const auto& p : result.points) {
      const auto it = p.summary.errors.find(result.metric);
      std::string value = p.value.dump();
      for (std::size_t pos = 0; (pos = value.find('"', pos)) != std::string::npos; pos += 2) {
        value.insert(pos, 1, '"');
      }
      csv += fmt::format("\"{}\",{:.17g},{},{}\n", value, p.summary.h,
                         it == p.summary.errors.end() ? std::string() : fmt::format("{:.17g}", it->second),
                         p.ok ? 1 : 0);
    }
    write_text((fs::path(*dir) / "sweep.csv").string(), csv);
  }
  return result;
}

}  // namespace tsgls::cli
