#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "tsgls/cli/cli.hpp"

namespace tsgls::cli {

namespace {

std::string join_problems(const std::vector<std::string>& p) {
  std::ostringstream msg;
  msg << "invalid configuration:";
  for (const auto& s : p) msg << "\n  " << s;
  return msg.str();
}

// Collects problems while walking a JSON object.
class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>& problems)
      : j_(j), path_(std::move(path)), problems_(problems) {
    if (!j_.is_object()) problems_.push_back(where() + "must be an object");
  }

  ~Reader() {
    if (!j_.is_object()) return;
    for (const auto& [key, v] : j_.items()) {
      if (!seen_.count(key)) problems_.push_back(where() + "unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.is_object() && j_.contains(key);
  }

  const json* get(const std::string& key) {
    return has(key) ? &j_.at(key) : nullptr;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    const json* v = get(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      problems_.push_back(where() + "'" + key + "' has the wrong type");
    }
  }

  void read_modes(const std::string& key, std::vector<cplx>& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_array()) {
      problems_.push_back(where() + "'" + key + "' must be an array");
      return;
    }
    out.clear();
    for (const auto& e : *v) {
      if (e.is_number()) {
        out.emplace_back(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
      } else {
        problems_.push_back(where() + "'" + key + "' entries must be numbers or [re, im] pairs");
        return;
      }
    }
  }

  std::string where() const { return path_.empty() ? "" : path_ + ": "; }
  std::vector<std::string>& problems() { return problems_; }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

void read_periodic(Reader& r, PeriodicData& d, bool required) {
  r.read_modes("modes", d.modes);
  r.read("samples", d.samples);
  const bool m = !d.modes.empty();
  const bool s = !d.samples.empty();
  if (m && s) r.problems().push_back(r.where() + "give either 'modes' or 'samples', not both");
  if (required && !m && !s) r.problems().push_back(r.where() + "needs 'modes' or 'samples'");
}

json modes_json(const std::vector<cplx>& modes) {
  json a = json::array();
  for (const auto& m : modes) a.push_back({m.real(), m.imag()});
  return a;
}

void write_periodic(json& j, const PeriodicData& d) {
  if (!d.modes.empty()) j["modes"] = modes_json(d.modes);
  if (!d.samples.empty()) j["samples"] = d.samples;
}

const char* kind_name(BcKind k) {
  switch (k) {
    case BcKind::wall: return "wall";
    case BcKind::dirichlet: return "dirichlet";
    case BcKind::neumann: return "neumann";
    case BcKind::exact: return "exact";
  }
  return "wall";
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : InvalidInput(join_problems(problems)), problems_(std::move(problems)) {}

spectral::SpectralCoeffs PeriodicData::coefficients(int n_modes) const {
  if (!samples.empty()) return spectral::fourier_coefficients(samples, n_modes);
  spectral::SpectralCoeffs c(n_modes);
  for (int n = 0; n < n_modes && n < static_cast<int>(modes.size()); ++n) c.set(n, modes[n]);
  return c;
}

double PeriodicData::truncation_error(int n_modes) const {
  return samples.empty() ? 0.0 : spectral::truncation_error(samples, n_modes);
}

double PeriodicData::value(double t, double omega, double period) const {
  if (!samples.empty()) {
    const auto n = static_cast<int>(samples.size());
    double phase = std::fmod(t / period, 1.0);
    if (phase < 0.0) phase += 1.0;
    const double pos = phase * n;
    const int k = static_cast<int>(std::floor(pos)) % n;
    const double w = pos - std::floor(pos);
    return (1.0 - w) * samples[k] + w * samples[(k + 1) % n];
  }
  double v = 0.0;
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const double ph = static_cast<double>(n) * omega * t;
    const cplx e{std::cos(ph), std::sin(ph)};
    v += (n == 0 ? 1.0 : 2.0) * (modes[n] * e).real();
  }
  return v;
}

double PhysicsConfig::time_period() const {
  return omega > 0.0 ? 2.0 * std::numbers::pi / omega : period;
}

CaseConfig parse_config(const json& j) {
  std::vector<std::string> problems;
  CaseConfig c;
  {
    Reader root(j, "", problems);
    if (const json* p = root.get("physics")) {
      Reader r(*p, "physics", problems);
      auto& ph = c.physics;
      r.read("problem", ph.problem);
      r.read("rho", ph.rho);
      r.read("mu", ph.mu);
      r.read("kappa", ph.kappa);
      r.read("omega", ph.omega);
      r.read("period", ph.period);
      r.read("n_modes", ph.n_modes);
      r.read("c_i", ph.c_i);
      r.read("backflow_beta", ph.backflow_beta);
      r.read("galerkin_only", ph.galerkin_only);
      if (const json* v = r.get("velocity")) {
        Reader rv(*v, "physics.velocity", problems);
        rv.read("direction", ph.velocity_direction);
        read_periodic(rv, ph.velocity, false);
      }
      if (ph.problem != "flow" && ph.problem != "scalar") {
        problems.push_back("physics: problem must be 'flow' or 'scalar'");
      }
      if (ph.n_modes < 1) problems.push_back("physics: n_modes must be >= 1");
      if (ph.omega < 0.0) problems.push_back("physics: omega must be >= 0");
      if (ph.n_modes > 1 && ph.omega == 0.0) {
        problems.push_back("physics: n_modes > 1 needs omega > 0");
      }
      if (!(ph.period > 0.0)) problems.push_back("physics: period must be > 0");
    } else {
      problems.emplace_back("missing 'physics' section");
    }

    if (const json* p = root.get("mesh")) {
      Reader r(*p, "mesh", problems);
      auto& m = c.mesh;
      r.read("generator", m.generator);
      r.read("file", m.file);
      r.read("origin", m.origin);
      r.read("extents", m.extents);
      r.read("resolution", m.resolution);
      r.read("width", m.width);
      r.read("length", m.length);
      r.read("branch_length", m.branch_length);
      r.read("n_width", m.n_width);
      static const std::set<std::string> gens{"interval", "rectangle", "box", "branching_box",
                                              "file"};
      if (!gens.count(m.generator)) {
        problems.push_back("mesh: unknown generator '" + m.generator + "'");
      }
      if (m.generator == "file" && m.file.empty()) problems.emplace_back("mesh: 'file' is required");
      const std::size_t dims = m.generator == "interval" ? 1 : m.generator == "rectangle" ? 2 : 3;
      if (m.generator == "interval" || m.generator == "rectangle" || m.generator == "box") {
        if (m.extents.size() != dims) {
          problems.push_back("mesh: extents needs " + std::to_string(dims) + " values");
        }
        if (m.resolution.size() != dims) {
          problems.push_back("mesh: resolution needs " + std::to_string(dims) + " values");
        }
        if (!m.origin.empty() && m.origin.size() != dims) {
          problems.push_back("mesh: origin needs " + std::to_string(dims) + " values");
        }
      }
    } else {
      problems.emplace_back("missing 'mesh' section");
    }

    if (const json* p = root.get("boundary")) {
      if (!p->is_object()) {
        problems.emplace_back("boundary: must be an object keyed by facet group");
      } else {
        for (const auto& [name, entry] : p->items()) {
          Reader r(entry, "boundary." + name, problems);
          BoundaryConfig b;
          std::string kind = "wall";
          r.read("kind", kind);
          if (kind == "wall") {
            b.kind = BcKind::wall;
          } else if (kind == "dirichlet") {
            b.kind = BcKind::dirichlet;
          } else if (kind == "neumann") {
            b.kind = BcKind::neumann;
          } else if (kind == "exact") {
            b.kind = BcKind::exact;
          } else {
            problems.push_back("boundary." + name + ": unknown kind '" + kind + "'");
          }
          r.read("profile", b.profile);
          r.read("direction", b.direction);
          const bool needs_data = b.kind == BcKind::dirichlet || b.kind == BcKind::neumann;
          read_periodic(r, b.data, needs_data);
          if (!needs_data && !b.data.empty()) {
            problems.push_back("boundary." + name + ": kind '" + kind + "' takes no data");
          }
          if (b.profile != "uniform" && b.profile != "parabolic") {
            problems.push_back("boundary." + name + ": profile must be 'uniform' or 'parabolic'");
          }
          c.boundary[name] = b;
        }
      }
    } else {
      problems.emplace_back("missing 'boundary' section");
    }

    if (const json* p = root.get("solver")) {
      Reader r(*p, "solver", problems);
      auto& s = c.solver;
      r.read("method", s.method);
      r.read("eps_nr", s.eps_nr);
      r.read("eps_ls", s.eps_ls);
      r.read("krylov_dim", s.krylov_dim);
      r.read("max_steps", s.max_steps);
      r.read("pseudo_dt", s.pseudo_dt);
      r.read("c1", s.c1);
      r.read("linear_solver", s.linear_solver);
      r.read("full_tangent", s.full_tangent);
      if (const json* t = r.get("time")) {
        Reader rt(*t, "solver.time", problems);
        rt.read("steps_per_cycle", s.time.steps_per_cycle);
        rt.read("n_cycles", s.time.n_cycles);
        rt.read("rho_inf", s.time.rho_inf);
        rt.read("max_newton", s.time.max_newton);
        rt.read("eps_nr", s.time.eps_nr);
        rt.read("ramp_steps", s.time.ramp_steps);
      }
      if (s.method != "spectral" && s.method != "time") {
        problems.emplace_back("solver: method must be 'spectral' or 'time'");
      }
      if (s.linear_solver != "gmres" && s.linear_solver != "direct") {
        problems.emplace_back("solver: linear_solver must be 'gmres' or 'direct'");
      }
    }

    if (const json* p = root.get("outputs")) {
      Reader r(*p, "outputs", problems);
      auto& o = c.outputs;
      r.read("directory", o.directory);
      r.read("formats", o.formats);
      r.read("field_samples", o.field_samples);
      r.read("trace_samples", o.trace_samples);
      r.read("groups", o.groups);
      for (const auto& f : o.formats) {
        if (f != "csv" && f != "vtk") {
          problems.push_back("outputs: unknown format '" + f + "'");
        }
      }
      if (o.field_samples < 1) problems.emplace_back("outputs: field_samples must be >= 1");
      if (o.trace_samples < 1) problems.emplace_back("outputs: trace_samples must be >= 1");
    }

    if (const json* p = root.get("oracle")) {
      Reader r(*p, "oracle", problems);
      r.read("type", c.oracle.type);
      if (const json* q = r.get("params")) c.oracle.params = *q;
      static const std::set<std::string> types{"poiseuille", "oscillatory_channel",
                                               "manufactured", "inflow"};
      if (!types.count(c.oracle.type)) {
        problems.push_back("oracle: unknown type '" + c.oracle.type + "'");
      }
    }
  }

  // Cross-field checks.
  const bool scalar = c.physics.problem == "scalar";
  for (const auto& [name, b] : c.boundary) {
    if (b.kind == BcKind::exact && c.oracle.type != "manufactured") {
      problems.push_back("boundary." + name + ": kind 'exact' needs the manufactured oracle");
    }
    if (scalar && b.kind == BcKind::wall) {
      problems.push_back("boundary." + name + ": walls apply to flow problems only");
    }
  }
  const auto& ot = c.oracle.type;
  if (ot == "manufactured" && !scalar) {
    problems.emplace_back("oracle: 'manufactured' applies to scalar problems only");
  }
  if (!ot.empty() && ot != "manufactured" && scalar) {
    problems.push_back("oracle: '" + ot + "' applies to flow problems only");
  }
  auto check_data = [&](const std::string& where, const PeriodicData& d) {
    const int n = c.physics.n_modes;
    if (!d.samples.empty() && static_cast<int>(d.samples.size()) < 2 * (2 * n - 1)) {
      problems.push_back(where + ": " + std::to_string(n) + " modes need at least " +
                         std::to_string(2 * (2 * n - 1)) + " samples");
    }
    if (c.physics.omega == 0.0 && d.modes.size() > 1) {
      problems.push_back(where + ": modes above 0 need omega > 0");
    }
  };
  for (const auto& [name, b] : c.boundary) check_data("boundary." + name, b.data);
  check_data("physics.velocity", c.physics.velocity);
  if (scalar && c.solver.method == "time") {
    problems.emplace_back("solver: the time method applies to flow problems only");
  }
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

CaseConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  return parse_config(j);
}

CaseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const CaseConfig& c) {
  json j;
  const auto& ph = c.physics;
  j["physics"] = {{"problem", ph.problem},   {"rho", ph.rho},
                  {"mu", ph.mu},             {"kappa", ph.kappa},
                  {"omega", ph.omega},       {"period", ph.period},
                  {"n_modes", ph.n_modes},   {"c_i", ph.c_i},
                  {"backflow_beta", ph.backflow_beta},
                  {"galerkin_only", ph.galerkin_only}};
  json vel = {{"direction", ph.velocity_direction}};
  write_periodic(vel, ph.velocity);
  j["physics"]["velocity"] = vel;

  const auto& m = c.mesh;
  j["mesh"] = {{"generator", m.generator}, {"file", m.file},
               {"origin", m.origin},       {"extents", m.extents},
               {"resolution", m.resolution}, {"width", m.width},
               {"length", m.length},       {"branch_length", m.branch_length},
               {"n_width", m.n_width}};

  j["boundary"] = json::object();
  for (const auto& [name, b] : c.boundary) {
    json e = {{"kind", kind_name(b.kind)}, {"profile", b.profile}, {"direction", b.direction}};
    write_periodic(e, b.data);
    j["boundary"][name] = e;
  }

  const auto& s = c.solver;
  j["solver"] = {{"method", s.method},         {"eps_nr", s.eps_nr},
                 {"eps_ls", s.eps_ls},         {"krylov_dim", s.krylov_dim},
                 {"max_steps", s.max_steps},   {"pseudo_dt", s.pseudo_dt},
                 {"c1", s.c1},                 {"linear_solver", s.linear_solver},
                 {"full_tangent", s.full_tangent},
                 {"time",
                  {{"steps_per_cycle", s.time.steps_per_cycle},
                   {"n_cycles", s.time.n_cycles},
                   {"rho_inf", s.time.rho_inf},
                   {"max_newton", s.time.max_newton},
                   {"eps_nr", s.time.eps_nr},
                   {"ramp_steps", s.time.ramp_steps}}}};

  const auto& o = c.outputs;
  j["outputs"] = {{"directory", o.directory},
                  {"formats", o.formats},
                  {"field_samples", o.field_samples},
                  {"trace_samples", o.trace_samples},
                  {"groups", o.groups}};
  if (!c.oracle.type.empty()) {
    j["oracle"] = {{"type", c.oracle.type}, {"params", c.oracle.params}};
  }
  return j;
}

}  // namespace tsgls::cli
