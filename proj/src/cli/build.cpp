#include <numbers>
#include <optional>

#include "tsgls/cli/cli.hpp"
#include "tsgls/mesh/io.hpp"

namespace tsgls::cli {

namespace {

std::vector<spectral::SpectralCoeffs> along(const std::array<double, 3>& dir, int dim,
                                            const spectral::SpectralCoeffs& q) {
  std::vector<spectral::SpectralCoeffs> v;
  for (int i = 0; i < dim; ++i) v.push_back(dir[i] * q);
  return v;
}

std::array<double, 3> origin_or_zero(const MeshConfig& m) {
  std::array<double, 3> o{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < m.origin.size() && i < 3; ++i) o[i] = m.origin[i];
  return o;
}

std::vector<cplx> modes_from_json(const json& a) {
  std::vector<cplx> out;
  if (!a.is_array()) throw ConfigError({"oracle: amplitudes must be an array"});
  for (const auto& e : a) {
    if (e.is_number()) {
      out.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      throw ConfigError({"oracle: amplitudes must be numbers or [re, im] pairs"});
    }
  }
  return out;
}

SpatialSpectral constant(const spectral::SpectralCoeffs& c) { return scalar::constant_data(c); }

}  // namespace

mesh::Mesh build_mesh(const CaseConfig& c) {
  const auto& m = c.mesh;
  const auto o = origin_or_zero(m);
  if (m.generator == "interval") {
    auto mesh = mesh::generate_interval(m.extents.at(0), m.resolution.at(0));
    for (auto& p : mesh.coords) p[0] += o[0];
    return mesh;
  }
  if (m.generator == "rectangle") {
    return mesh::generate_rectangle({o[0], o[1]}, {m.extents.at(0), m.extents.at(1)},
                                    {m.resolution.at(0), m.resolution.at(1)});
  }
  if (m.generator == "box") {
    return mesh::generate_box_tet({m.extents.at(0), m.extents.at(1), m.extents.at(2)},
                                  {m.resolution.at(0), m.resolution.at(1), m.resolution.at(2)}, o);
  }
  if (m.generator == "branching_box") {
    return mesh::generate_branching_box(m.width, m.length, m.branch_length, m.n_width);
  }
  return mesh::load_mesh(m.file);
}

std::vector<std::string> check_against_mesh(const CaseConfig& c, const mesh::Mesh& mesh) {
  std::vector<std::string> problems;
  const bool flow = c.physics.problem == "flow";
  for (const auto& [name, b] : c.boundary) {
    if (!mesh.has_group(name)) problems.push_back("unknown facet group '" + name + "'");
    if (flow && b.kind == BcKind::dirichlet && b.profile == "parabolic" && mesh.dim == 1) {
      problems.push_back("boundary." + name + ": parabolic profiles need a 2D or 3D mesh");
    }
  }
  if (flow) {
    for (const auto& [name, facets] : mesh.facet_groups) {
      if (!c.boundary.count(name)) {
        problems.push_back("facet group '" + name + "' has no boundary condition");
      }
    }
  }
  for (const auto& g : c.outputs.groups) {
    if (!mesh.has_group(g)) problems.push_back("outputs: unknown facet group '" + g + "'");
  }
  const auto& t = c.oracle.type;
  if ((t == "poiseuille" || t == "oscillatory_channel") && mesh.dim != 2) {
    problems.push_back("oracle: '" + t + "' needs a 2D mesh");
  }
  if (t == "inflow") {
    const auto inlet = c.oracle.params.value("inlet", std::string());
    const auto it = c.boundary.find(inlet);
    if (it == c.boundary.end() || it->second.kind != BcKind::dirichlet) {
      problems.push_back("oracle: 'inlet' must name a Dirichlet group");
    }
  }
  return problems;
}

ns::NSCase build_flow_case(const CaseConfig& c, const mesh::Mesh& mesh) {
  const auto& ph = c.physics;
  ns::NSCase nc;
  nc.rho = ph.rho;
  nc.mu = ph.mu;
  nc.omega = ph.omega;
  nc.n_modes = ph.n_modes;
  nc.c_i = ph.c_i;
  nc.backflow_beta = ph.backflow_beta;
  for (const auto& [name, b] : c.boundary) {
    const auto q = b.data.coefficients(ph.n_modes);
    switch (b.kind) {
      case BcKind::wall:
        nc.walls.push_back(name);
        break;
      case BcKind::dirichlet:
        nc.dirichlet[name] = b.profile == "parabolic"
                                 ? ns::parabolic_inflow(mesh, name, q)
                                 : ns::uniform_velocity(along(b.direction, mesh.dim, q));
        break;
      case BcKind::neumann:
        nc.neumann[name] = constant(q);
        break;
      case BcKind::exact:
        throw ConfigError({"boundary." + name + ": kind 'exact' is not available for flow"});
    }
  }
  return nc;
}

transient::TimeCase build_time_case(const CaseConfig& c, const mesh::Mesh& mesh) {
  const auto& ph = c.physics;
  transient::TimeCase tc;
  tc.rho = ph.rho;
  tc.mu = ph.mu;
  tc.c_i = ph.c_i;
  tc.backflow_beta = ph.backflow_beta;
  tc.period = ph.time_period();
  tc.n_cycles = c.solver.time.n_cycles;
  tc.steps_per_cycle = c.solver.time.steps_per_cycle;
  const double omega = ph.omega;
  const double period = tc.period;
  const int dim = mesh.dim;
  // The time run sees the full boundary signal, not its N-mode truncation.
  for (const auto& [name, b] : c.boundary) {
    const PeriodicData data = b.data;
    switch (b.kind) {
      case BcKind::wall:
        tc.walls.push_back(name);
        break;
      case BcKind::dirichlet:
        if (b.profile == "parabolic") {
          spectral::SpectralCoeffs unit(1);
          unit.set(0, 1.0);
          const auto shape = ns::parabolic_inflow(mesh, name, unit);
          tc.dirichlet[name] = [shape, data, omega, period](int node, const Point& x, double t) {
            const auto s = shape(node, x);
            const double q = data.value(t, omega, period);
            std::vector<double> v(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) v[i] = s[i][0].real() * q;
            return v;
          };
        } else {
          const auto dir = b.direction;
          tc.dirichlet[name] = [dir, dim, data, omega, period](int, const Point&, double t) {
            const double q = data.value(t, omega, period);
            std::vector<double> v(dim);
            for (int i = 0; i < dim; ++i) v[i] = dir[i] * q;
            return v;
          };
        }
        break;
      case BcKind::neumann:
        tc.neumann[name] = [data, omega, period](const Point&, double t) {
          return data.value(t, omega, period);
        };
        break;
      case BcKind::exact:
        throw ConfigError({"boundary." + name + ": kind 'exact' is not available for flow"});
    }
  }
  return tc;
}

scalar::ScalarCase build_scalar_case(const CaseConfig& c, const mesh::Mesh& mesh) {
  const auto& ph = c.physics;
  scalar::ScalarCase sc;
  sc.kappa = ph.kappa;
  sc.omega = ph.omega;
  sc.n_modes = ph.n_modes;
  sc.c_i = ph.c_i;
  sc.backflow_beta = ph.backflow_beta;
  sc.galerkin_only = ph.galerkin_only;
  const int n = ph.n_modes;
  const auto vel = along(ph.velocity_direction, mesh.dim, ph.velocity.coefficients(n));
  if (!ph.velocity.empty()) {
    sc.velocity = VelocityField::from_function(
        mesh, n, [&vel](const Point&, int i) { return vel[i]; });
  }
  std::optional<verification::Manufactured> mms;
  if (c.oracle.type == "manufactured") {
    const auto& p = c.oracle.params;
    PeriodicData amp;
    if (p.contains("amplitudes")) amp.modes = modes_from_json(p.at("amplitudes"));
    if (amp.modes.empty()) throw ConfigError({"oracle: 'amplitudes' needs at least one mode"});
    mms = verification::manufactured_sine(mesh.dim, vel, ph.kappa, ph.omega, amp.coefficients(n),
                                          p.value("wavenumber", std::numbers::pi),
                                          p.value("shift", 0.3));
    sc.source = mms->source;
  }
  for (const auto& [name, b] : c.boundary) {
    switch (b.kind) {
      case BcKind::dirichlet:
        sc.dirichlet[name] = constant(b.data.coefficients(n));
        break;
      case BcKind::neumann:
        sc.neumann[name] = constant(b.data.coefficients(n));
        break;
      case BcKind::exact:
        sc.dirichlet[name] = mms->exact;
        break;
      case BcKind::wall:
        break;
    }
  }
  return sc;
}

}  // namespace tsgls::cli
