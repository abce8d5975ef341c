#include <cmath>
#include <numbers>
#include <sstream>

#include "tsgls/assembly.hpp"
#include "tsgls/mesh/quadrature.hpp"
#include "tsgls/mesh/shape.hpp"
#include "tsgls/spectral/tau.hpp"
#include "tsgls/time/time_solver.hpp"

namespace tsgls::transient {

void validate_case(const TimeCase& c, const mesh::Mesh& mesh) {
  std::vector<std::string> problems;
  if (!(c.rho > 0.0)) problems.emplace_back("rho must be > 0");
  if (!(c.mu > 0.0)) problems.emplace_back("mu must be > 0");
  if (c.c_i < 0.0) problems.emplace_back("c_i must be >= 0");
  if (c.backflow_beta < 0.0 || c.backflow_beta > 1.0) {
    problems.emplace_back("backflow beta must lie in [0, 1]");
  }
  if (!(c.period > 0.0) || !std::isfinite(c.period)) problems.emplace_back("period must be > 0");
  if (c.n_cycles < 1) problems.emplace_back("n_cycles must be >= 1");
  if (c.steps_per_cycle < 1) problems.emplace_back("steps_per_cycle must be >= 1");
  std::map<std::string, int> roles;
  for (const auto& [name, fn] : c.dirichlet) {
    ++roles[name];
    if (!fn) problems.push_back("empty Dirichlet data for group '" + name + "'");
  }
  for (const auto& [name, fn] : c.neumann) {
    ++roles[name];
    if (!fn) problems.push_back("empty Neumann data for group '" + name + "'");
  }
  for (const auto& name : c.walls) ++roles[name];
  for (const auto& [name, count] : roles) {
    if (!mesh.has_group(name)) problems.push_back("unknown facet group '" + name + "'");
    if (count > 1) problems.push_back("facet group '" + name + "' has more than one role");
  }
  for (const auto& [name, facets] : mesh.facet_groups) {
    if (!roles.count(name)) problems.push_back("facet group '" + name + "' has no boundary condition");
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "time case invalid:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw InvalidInput(msg.str());
  }
}

TimeCase time_case_from(const ns::NSCase& c, int steps_per_cycle, int n_cycles, double period) {
  TimeCase t;
  t.rho = c.rho;
  t.mu = c.mu;
  t.walls = c.walls;
  t.c_i = c.c_i;
  t.backflow_beta = c.backflow_beta;
  t.steps_per_cycle = steps_per_cycle;
  t.n_cycles = n_cycles;
  if (c.omega > 0.0) {
    t.period = 2.0 * std::numbers::pi / c.omega;
  } else if (period > 0.0) {
    t.period = period;
  } else {
    throw InvalidInput("time_case_from: steady case needs an explicit period");
  }
  const double omega = c.omega;
  for (const auto& [name, fn] : c.dirichlet) {
    t.dirichlet[name] = [fn, omega](int node, const Point& x, double time) {
      const auto modes = fn(node, x);
      std::vector<double> v(modes.size());
      for (std::size_t i = 0; i < modes.size(); ++i) {
        v[i] = spectral::evaluate_in_time(modes[i], omega, time);
      }
      return v;
    };
  }
  for (const auto& [name, fn] : c.neumann) {
    t.neumann[name] = [fn, omega](const Point& x, double time) {
      return spectral::evaluate_in_time(fn(x), omega, time);
    };
  }
  return t;
}

void GenAlphaConfig::validate() const {
  if (!(rho_inf >= 0.0 && rho_inf <= 1.0)) {
    throw InvalidInput("generalized-alpha: rho_inf must lie in [0, 1]");
  }
}

void TimeSolverConfig::validate() const {
  alpha.validate();
  std::vector<std::string> problems;
  if (!(eps_nr > 0.0 && eps_nr < 1.0)) problems.emplace_back("eps_nr must lie in (0, 1)");
  if (abs_tol < 0.0) problems.emplace_back("abs_tol must be >= 0");
  if (max_newton < 1) problems.emplace_back("max_newton must be >= 1");
  if (ramp_steps < 0) problems.emplace_back("ramp_steps must be >= 0");
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "time solver config invalid:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw InvalidInput(msg.str());
  }
}

TimeState TimeState::zero(const mesh::Mesh& mesh) {
  TimeState s;
  s.dim = mesh.dim;
  s.velocity.assign(mesh.dim, RVector::Zero(mesh.n_nodes()));
  s.acceleration.assign(mesh.dim, RVector::Zero(mesh.n_nodes()));
  s.pressure = RVector::Zero(mesh.n_nodes());
  return s;
}

double time_tau(std::span<const double> u, double omega_hat, const SpatialMatrix& g, double nu,
                double c_i) {
  const auto dim = static_cast<Eigen::Index>(u.size());
  if (g.rows() != dim || g.cols() != dim) throw InvalidInput("time_tau: metric size mismatch");
  double ugu = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) ugu += u[i] * g(i, j) * u[j];
  }
  const double arg = omega_hat * omega_hat + ugu + c_i * nu * nu * spectral::metric_contraction(g);
  if (!std::isfinite(arg)) throw NumericalError("time_tau: non-finite argument");
  if (!(arg > 0.0)) throw InvalidInput("time_tau: all terms vanish");
  return 1.0 / std::sqrt(arg);
}

double omega_hat(const mesh::Mesh& mesh, const std::vector<RVector>& velocity,
                 const std::vector<RVector>& acceleration) {
  const auto& rule = mesh::assembly_rule(mesh.type());
  const int nv = mesh.nodes_per_element();
  double uu = 0.0;
  double aa = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    for (const auto& q : mesh::shape_eval(mesh, e, rule)) {
      for (int i = 0; i < mesh.dim; ++i) {
        double u = 0.0;
        double a = 0.0;
        for (int b = 0; b < nv; ++b) {
          u += q.values[b] * velocity[i][conn[b]];
          a += q.values[b] * acceleration[i][conn[b]];
        }
        uu += q.weight * u * u;
        aa += q.weight * a * a;
      }
    }
  }
  return uu > 0.0 ? std::sqrt(aa / uu) : 0.0;
}

std::pair<double, double> group_flow(const TimeState& state, const mesh::Mesh& mesh,
                                     const std::string& group) {
  const auto& rule = mesh::facet_rule(mesh.type());
  const int nv = mesh.nodes_per_element();
  double flow = 0.0;
  double p_int = 0.0;
  double area = 0.0;
  for (const auto& facet : mesh.group(group)) {
    const auto geo = mesh::facet_normal_area(mesh, facet);
    const auto& conn = mesh.elements[facet.element];
    area += geo.measure;
    for (int q = 0; q < rule.size(); ++q) {
      Point x;
      const auto n = facet_shape_values(mesh, facet, rule.points[q], x);
      const double w = rule.weights[q] * geo.measure;
      for (int b = 0; b < nv; ++b) {
        if (n[b] == 0.0) continue;
        double un = 0.0;
        for (int i = 0; i < mesh.dim; ++i) un += state.velocity[i][conn[b]] * geo.normal[i];
        flow += w * n[b] * un;
        p_int += w * n[b] * state.pressure[conn[b]];
      }
    }
  }
  return {flow, area > 0.0 ? p_int / area : 0.0};
}

}  // namespace tsgls::transient
