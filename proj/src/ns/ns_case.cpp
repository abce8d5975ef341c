#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include "tsgls/assembly.hpp"
#include "tsgls/mesh/quadrature.hpp"
#include "tsgls/ns/ns_solver.hpp"
#include "tsgls/spectral/hermitian.hpp"
#include "tsgls/spectral/matrices.hpp"

namespace tsgls::ns {

using spectral::SpectralCoeffs;

VectorData uniform_velocity(std::vector<SpectralCoeffs> modes) {
  return [modes = std::move(modes)](int, const Point&) { return modes; };
}

void validate_case(const NSCase& c, const mesh::Mesh& mesh) {
  std::vector<std::string> problems;
  if (!(c.rho > 0.0)) problems.emplace_back("rho must be > 0");
  if (!(c.mu > 0.0)) problems.emplace_back("mu must be > 0");
  if (c.omega < 0.0) problems.emplace_back("omega must be >= 0");
  if (c.n_modes < 1) problems.emplace_back("n_modes must be >= 1");
  if (c.c_i < 0.0) problems.emplace_back("c_i must be >= 0");
  if (c.backflow_beta < 0.0 || c.backflow_beta > 1.0) {
    problems.emplace_back("backflow beta must lie in [0, 1]");
  }
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
    msg << "flow case invalid:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw InvalidInput(msg.str());
  }
}

NSState NSState::zero(const mesh::Mesh& mesh, int n_modes) {
  NSState s;
  s.dim = mesh.dim;
  s.n_modes = n_modes;
  s.velocity.assign(mesh.dim, zero_field(mesh.n_nodes(), n_modes));
  s.pressure = zero_field(mesh.n_nodes(), n_modes);
  return s;
}

linalg::RealLayout NSState::layout() const {
  return {static_cast<int>(pressure.size()), dim + 1, n_modes};
}

CVector NSState::pack() const {
  std::vector<const SpectralField*> comps;
  for (const auto& v : velocity) comps.push_back(&v);
  comps.push_back(&pressure);
  return pack_complex(comps, layout());
}

void NSState::unpack(const CVector& x) {
  std::vector<SpectralField*> comps;
  for (auto& v : velocity) comps.push_back(&v);
  comps.push_back(&pressure);
  unpack_complex(x, layout(), comps);
}

std::map<int, std::vector<SpectralCoeffs>> dirichlet_values(const NSCase& c,
                                                            const mesh::Mesh& mesh) {
  std::map<int, std::vector<SpectralCoeffs>> out;
  for (const auto& [name, fn] : c.dirichlet) {
    for (int node : mesh::group_nodes(mesh, {name})) {
      auto v = fn(node, mesh.coords[node]);
      if (static_cast<int>(v.size()) != mesh.dim) {
        throw InvalidInput("Dirichlet data for '" + name + "' has the wrong component count");
      }
      for (const auto& m : v) {
        if (m.n_modes() != c.n_modes) {
          throw InvalidInput("Dirichlet data for '" + name + "' has the wrong mode count");
        }
      }
      out[node] = std::move(v);
    }
  }
  const std::vector<SpectralCoeffs> zero(mesh.dim, SpectralCoeffs(c.n_modes));
  for (int node : mesh::group_nodes(mesh, c.walls)) out[node] = zero;
  return out;
}

NSState initial_state(const NSCase& c, const mesh::Mesh& mesh) {
  auto s = NSState::zero(mesh, c.n_modes);
  for (const auto& [node, v] : dirichlet_values(c, mesh)) {
    for (int i = 0; i < mesh.dim; ++i) s.velocity[i][node] = v[i];
  }
  return s;
}

void SolverConfig::validate() const {
  if (!(eps_nr > 0.0 && eps_nr < 1.0)) throw InvalidInput("solver: eps_nr must lie in (0, 1)");
  if (!(eps_ls > 0.0 && eps_ls < 1.0)) throw InvalidInput("solver: eps_ls must lie in (0, 1)");
  if (krylov_dim < 2) throw InvalidInput("solver: krylov_dim must be >= 2");
  if (max_linear_iters < 1) throw InvalidInput("solver: max_linear_iters must be >= 1");
  if (pseudo_dt < 0.0) throw InvalidInput("solver: pseudo_dt must be >= 0");
  if (max_steps < 1) throw InvalidInput("solver: max_steps must be >= 1");
  if (!(c1 > 0.0)) throw InvalidInput("solver: c1 must be > 0");
}

double default_pseudo_dt(const NSCase& c) {
  if (c.omega <= 0.0 || c.n_modes == 1) return std::numeric_limits<double>::infinity();
  return 10.0 * (2.0 * std::numbers::pi / c.omega) / 100.0;
}

CMatrix backflow_matrix(const CMatrix& a_n, double rho, double beta) {
  if (beta == 0.0) return CMatrix::Zero(a_n.rows(), a_n.cols());
  return (0.5 * rho * beta) * spectral::matrix_negative_part(a_n);
}

VelocityField velocity_field(const NSState& s) {
  VelocityField v;
  v.dim = s.dim;
  v.n_modes = s.n_modes;
  const int n_nodes = static_cast<int>(s.pressure.size());
  v.values.reserve(static_cast<std::size_t>(n_nodes) * s.dim);
  for (int node = 0; node < n_nodes; ++node) {
    for (int i = 0; i < s.dim; ++i) v.values.push_back(s.velocity[i][node]);
  }
  return v;
}

CMatrix backflow_surface_matrix(const NSState& state, const mesh::Mesh& mesh,
                                const mesh::Facet& facet, double rho, double beta) {
  const auto geo = mesh::facet_normal_area(mesh, facet);
  Point bary{0.0, 0.0, 0.0};
  for (int k = 0; k < mesh.nodes_per_facet(); ++k) bary[k] = 1.0 / mesh.nodes_per_facet();
  Point x;
  const auto n = facet_shape_values(mesh, facet, bary, x);
  const auto a = convolution_at(velocity_field(state), mesh.elements[facet.element],
                                mesh.nodes_per_element(), n);
  return backflow_matrix(normal_convolution(a, geo.normal), rho, beta);
}

FlowReport flow_report(const NSState& state, const mesh::Mesh& mesh,
                       const std::vector<std::string>& groups) {
  FlowReport out;
  const auto& rule = mesh::facet_rule(mesh.type());
  const int nv = mesh.nodes_per_element();
  for (const auto& name : groups) {
    GroupFlow g{SpectralCoeffs(state.n_modes), SpectralCoeffs(state.n_modes), 0.0};
    for (const auto& facet : mesh.group(name)) {
      const auto geo = mesh::facet_normal_area(mesh, facet);
      const auto& conn = mesh.elements[facet.element];
      g.area += geo.measure;
      for (int q = 0; q < rule.size(); ++q) {
        Point x;
        const auto n = facet_shape_values(mesh, facet, rule.points[q], x);
        const double w = rule.weights[q] * geo.measure;
        for (int i = 0; i < mesh.dim; ++i) {
          g.flow += (w * geo.normal[i]) * interpolate_field(state.velocity[i], conn, nv, n);
        }
        g.pressure += w * interpolate_field(state.pressure, conn, nv, n);
      }
    }
    if (g.area > 0.0) g.pressure *= 1.0 / g.area;
    out.emplace(name, std::move(g));
  }
  return out;
}

VectorData parabolic_inflow(const mesh::Mesh& mesh, const std::string& group,
                            const SpectralCoeffs& q) {
  const auto& facets = mesh.group(group);
  if (facets.empty()) throw InvalidInput("parabolic inflow: group '" + group + "' is empty");
  const int nf = mesh.nodes_per_facet();

  // Area-weighted mean outward normal and centroid.
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  double area = 0.0;
  for (const auto& f : facets) {
    const auto geo = mesh::facet_normal_area(mesh, f);
    const auto c = mesh::facet_centroid(mesh, f);
    normal += geo.measure * Eigen::Vector3d(geo.normal[0], geo.normal[1], geo.normal[2]);
    centroid += geo.measure * Eigen::Vector3d(c[0], c[1], c[2]);
    area += geo.measure;
  }
  normal.normalize();
  centroid /= area;

  const auto nodes = mesh::group_nodes(mesh, {group});
  std::map<int, int> local;
  for (int k = 0; k < static_cast<int>(nodes.size()); ++k) local[nodes[k]] = k;

  double extent = 0.0, offplane = 0.0;
  for (int node : nodes) {
    const auto& x = mesh.coords[node];
    const Eigen::Vector3d d = Eigen::Vector3d(x[0], x[1], x[2]) - centroid;
    extent = std::max(extent, d.norm());
    offplane = std::max(offplane, std::abs(d.dot(normal)));
  }
  if (offplane > 1e-3 * extent) {
    spdlog::warn("parabolic inflow: group '{}' is not planar (deviation {:.3e}, extent {:.3e})",
                 group, offplane, extent);
  }

  std::map<int, double> shape;
  if (mesh.dim == 1) {
    for (int node : nodes) shape[node] = 1.0 / area;
  } else {
    // In-plane coordinates.
    Eigen::Vector3d t1 = normal.unitOrthogonal();
    Eigen::Vector3d t2 = normal.cross(t1);
    auto planar = [&](int node) {
      const auto& x = mesh.coords[node];
      const Eigen::Vector3d d = Eigen::Vector3d(x[0], x[1], x[2]) - centroid;
      return Eigen::Vector2d(d.dot(t1), d.dot(t2));
    };
    // Rim: facet boundary pieces owned by a single facet.
    std::map<std::vector<int>, int> pieces;
    for (const auto& f : facets) {
      for (int k = 0; k < nf; ++k) {
        std::vector<int> piece;
        for (int j = 0; j < nf; ++j) {
          if (j != k) piece.push_back(f.nodes[j]);
        }
        std::sort(piece.begin(), piece.end());
        ++pieces[piece];
      }
    }
    std::set<int> rim;
    for (const auto& [piece, count] : pieces) {
      if (count == 1) rim.insert(piece.begin(), piece.end());
    }

    const int n = static_cast<int>(nodes.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
    for (const auto& f : facets) {
      std::array<int, 3> ids{};
      for (int k = 0; k < nf; ++k) ids[k] = local[f.nodes[k]];
      Eigen::MatrixXd grads(nf, 2);
      double meas = 0.0;
      if (nf == 2) {
        const double s0 = planar(f.nodes[0])[0], s1 = planar(f.nodes[1])[0];
        meas = std::abs(s1 - s0);
        grads << -1.0 / (s1 - s0), 0.0, 1.0 / (s1 - s0), 0.0;
      } else {
        const auto p0 = planar(f.nodes[0]), p1 = planar(f.nodes[1]), p2 = planar(f.nodes[2]);
        Eigen::Matrix2d j;
        j.col(0) = p1 - p0;
        j.col(1) = p2 - p0;
        meas = 0.5 * std::abs(j.determinant());
        const Eigen::Matrix2d jinv_t = j.inverse().transpose();
        grads.row(0) = (jinv_t * Eigen::Vector2d(-1.0, -1.0)).transpose();
        grads.row(1) = (jinv_t * Eigen::Vector2d(1.0, 0.0)).transpose();
        grads.row(2) = (jinv_t * Eigen::Vector2d(0.0, 1.0)).transpose();
      }
      for (int a = 0; a < nf; ++a) {
        load[ids[a]] += meas / nf;
        for (int b = 0; b < nf; ++b) {
          trip.emplace_back(ids[a], ids[b], meas * grads.row(a).dot(grads.row(b)));
        }
      }
    }
    // Rim rows become identity with zero data.
    std::vector<Eigen::Triplet<double>> kept;
    for (const auto& t : trip) {
      if (!rim.count(nodes[t.row()]) && !rim.count(nodes[t.col()])) kept.push_back(t);
    }
    for (int node : rim) {
      kept.emplace_back(local[node], local[node], 1.0);
      load[local[node]] = 0.0;
    }
    Eigen::SparseMatrix<double> k(n, n);
    k.setFromTriplets(kept.begin(), kept.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(k);
    if (lu.info() != Eigen::Success) throw NumericalError("parabolic inflow: profile solve failed");
    const Eigen::VectorXd s = lu.solve(load);
    // Integral of the linear interpolant.
    double integral = 0.0;
    for (const auto& f : facets) {
      const double meas = mesh::facet_normal_area(mesh, f).measure;
      for (int k2 = 0; k2 < nf; ++k2) integral += meas / nf * s[local[f.nodes[k2]]];
    }
    if (!(integral > 0.0)) throw NumericalError("parabolic inflow: degenerate profile");
    for (int node : nodes) shape[node] = s[local[node]] / integral;
  }

  const int dim = mesh.dim;
  return [shape = std::move(shape), normal, q, dim](int node, const Point&) {
    std::vector<SpectralCoeffs> out(dim, SpectralCoeffs(q.n_modes()));
    const auto it = shape.find(node);
    if (it == shape.end()) return out;
    for (int i = 0; i < dim; ++i) out[i] = (-normal[i] * it->second) * q;
    return out;
  };
}

}  // namespace tsgls::ns
