#include "tsgls/scalar/scalar_solver.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "tsgls/assembly.hpp"
#include "tsgls/linalg/preconditioner.hpp"
#include "tsgls/mesh/quadrature.hpp"
#include "tsgls/mesh/shape.hpp"
#include "tsgls/spectral/hermitian.hpp"
#include "tsgls/spectral/matrices.hpp"
#include "tsgls/spectral/tau.hpp"

namespace tsgls::scalar {

using spectral::SpectralCoeffs;

SpatialSpectral constant_data(const SpectralCoeffs& c) {
  return [c](const Point&) { return c; };
}

void validate_case(const ScalarCase& c, const mesh::Mesh& mesh) {
  if (!(c.kappa > 0.0)) throw InvalidInput("scalar case: kappa must be > 0");
  if (c.omega < 0.0) throw InvalidInput("scalar case: omega must be >= 0");
  if (c.n_modes < 1) throw InvalidInput("scalar case: n_modes must be >= 1");
  if (c.dirichlet.empty()) throw InvalidInput("scalar case: at least one Dirichlet group required");
  if (c.backflow_beta < 0.0 || c.backflow_beta > 1.0) {
    throw InvalidInput("scalar case: backflow beta must lie in [0, 1]");
  }
  if (c.c_i < 0.0) throw InvalidInput("scalar case: c_i must be >= 0");
  for (const auto* groups : {&c.dirichlet, &c.neumann}) {
    for (const auto& [name, fn] : *groups) {
      mesh.group(name);
      if (!fn) throw InvalidInput("scalar case: empty data for group '" + name + "'");
    }
  }
  for (const auto& [name, fn] : c.neumann) {
    if (c.dirichlet.count(name)) {
      throw InvalidInput("scalar case: group '" + name + "' is both Dirichlet and Neumann");
    }
  }
  if (!c.velocity.values.empty()) {
    if (c.velocity.dim != mesh.dim || c.velocity.n_modes != c.n_modes ||
        static_cast<int>(c.velocity.values.size()) != mesh.n_nodes() * mesh.dim) {
      throw InvalidInput("scalar case: velocity field does not match mesh and mode count");
    }
  }
}

namespace {

VelocityField effective_velocity(const ScalarCase& c, const mesh::Mesh& mesh) {
  if (!c.velocity.values.empty()) return c.velocity;
  return VelocityField::zero(mesh.n_nodes(), mesh.dim, c.n_modes);
}

double effective_c_i(const ScalarCase& c, const mesh::Mesh& mesh) {
  return c.c_i > 0.0 ? c.c_i : mesh::default_c_i(mesh.type());
}

void check_data(const SpectralCoeffs& v, int n_modes, const char* what) {
  if (v.n_modes() != n_modes) {
    std::ostringstream msg;
    msg << "scalar case: " << what << " has " << v.n_modes() << " modes, expected " << n_modes;
    throw InvalidInput(msg.str());
  }
}

struct ElementBlocks {
  CMatrix k;    // (nv M) x (nv M)
  CVector rhs;  // nv M
};

// Galerkin plus least-squares contributions of one element.
void element_kernel(const ScalarCase& c, const mesh::Mesh& mesh, const VelocityField& vel,
                    double c_i, int e, ElementBlocks& out) {
  const int nv = mesh.nodes_per_element();
  const int m = 2 * c.n_modes - 1;
  const auto& conn = mesh.elements[e];
  out.k.setZero(nv * m, nv * m);
  out.rhs.setZero(nv * m);
  const CMatrix omega = spectral::build_omega(c.n_modes, c.omega).dense();
  const auto qps = mesh::shape_eval(mesh, e, mesh::assembly_rule(mesh.type()));
  std::vector<CMatrix> ea(nv);
  std::vector<CMatrix> fa(nv);
  for (const auto& q : qps) {
    const auto a = convolution_at(vel, conn, nv, q.values);
    for (int b = 0; b < nv; ++b) {
      ea[b] = q.values[b] * omega;
      for (int i = 0; i < mesh.dim; ++i) ea[b] += q.grads(b, i) * a[i];
    }
    spectral::TauMatrix tau;
    if (!c.galerkin_only) {
      tau = spectral::compute_tau(a, q.metric, c.kappa, c_i);
      for (int b = 0; b < nv; ++b) fa[b] = tau.sqrt_tau * ea[b];
    }
    CVector f;
    if (c.source) {
      const auto fv = c.source(q.x);
      check_data(fv, c.n_modes, "source");
      f = fv.to_vector();
    }
    for (int ia = 0; ia < nv; ++ia) {
      for (int ib = 0; ib < nv; ++ib) {
        auto blk = out.k.block(ia * m, ib * m, m, m);
        blk += q.weight * q.values[ia] * ea[ib];
        const double diff = c.kappa * q.grads.row(ia).dot(q.grads.row(ib));
        blk.diagonal().array() += q.weight * diff;
        if (!c.galerkin_only) blk += q.weight * (fa[ia].adjoint() * fa[ib]);
      }
      if (c.source) {
        auto r = out.rhs.segment(ia * m, m);
        r += q.weight * q.values[ia] * f;
        if (!c.galerkin_only) r += q.weight * (ea[ia].adjoint() * (tau.tau * f));
      }
    }
  }
}

// Natural-boundary groups: every group not listed as Dirichlet.
std::vector<std::string> natural_groups(const ScalarCase& c, const mesh::Mesh& mesh) {
  std::vector<std::string> out;
  for (const auto& [name, facets] : mesh.facet_groups) {
    if (!c.dirichlet.count(name)) out.push_back(name);
  }
  return out;
}

}  // namespace

ScalarSystem assemble_scalar(const ScalarCase& c, const mesh::Mesh& mesh, Execution exec) {
  validate_case(c, mesh);
  const VelocityField vel = effective_velocity(c, mesh);
  const double c_i = effective_c_i(c, mesh);
  const int nv = mesh.nodes_per_element();
  const int m = 2 * c.n_modes - 1;

  ScalarSystem out;
  out.system = linalg::make_complex_system(linalg::build_node_graph(mesh), 1, c.n_modes);
  auto& sys = out.system;
  const auto edges = linalg::element_edge_map(mesh, sys.graph);

  element_loop<ElementBlocks>(
      mesh.n_elements(), exec,
      [&](int e, ElementBlocks& local) { element_kernel(c, mesh, vel, c_i, e, local); },
      [&](int e, const ElementBlocks& local) {
        const auto& conn = mesh.elements[e];
        for (int a = 0; a < nv; ++a) {
          sys.rhs.segment(conn[a] * m, m) += local.rhs.segment(a * m, m);
          for (int b = 0; b < nv; ++b) {
            sys.blocks[edges[e][a * nv + b]] += local.k.block(a * m, b * m, m, m);
          }
        }
      });

  // Facet terms: Neumann flux and backflow on natural boundaries.
  const auto& frule = mesh::facet_rule(mesh.type());
  for (const auto& name : natural_groups(c, mesh)) {
    const auto neumann = c.neumann.find(name);
    for (const auto& facet : mesh.group(name)) {
      const auto geo = mesh::facet_normal_area(mesh, facet);
      const auto& conn = mesh.elements[facet.element];
      for (int qi = 0; qi < frule.size(); ++qi) {
        Point x;
        const auto n = facet_shape_values(mesh, facet, frule.points[qi], x);
        const double w = frule.weights[qi] * geo.measure;
        if (neumann != c.neumann.end()) {
          const auto h = neumann->second(x);
          check_data(h, c.n_modes, "Neumann data");
          const CVector hv = h.to_vector();
          for (int a = 0; a < nv; ++a) sys.rhs.segment(conn[a] * m, m) += w * n[a] * hv;
        }
        if (c.backflow_beta > 0.0) {
          const auto a = convolution_at(vel, conn, nv, n);
          const CMatrix neg = spectral::matrix_negative_part(normal_convolution(a, geo.normal));
          if (neg.isZero(0.0)) continue;
          for (int ia = 0; ia < nv; ++ia) {
            for (int ib = 0; ib < nv; ++ib) {
              if (n[ia] == 0.0 || n[ib] == 0.0) continue;
              const int edge = sys.graph.find(conn[ia], conn[ib]);
              sys.blocks[edge] -= (w * n[ia] * n[ib] * 0.5 * c.backflow_beta) * neg;
            }
          }
        }
      }
    }
  }

  // Dirichlet data; a node shared by several groups takes the last one.
  out.dirichlet_values = zero_field(mesh.n_nodes(), c.n_modes);
  std::set<int> nodes;
  for (const auto& [name, fn] : c.dirichlet) {
    for (int node : mesh::group_nodes(mesh, {name})) {
      auto v = fn(mesh.coords[node]);
      check_data(v, c.n_modes, "Dirichlet data");
      out.dirichlet_values[node] = std::move(v);
      nodes.insert(node);
    }
  }
  out.dirichlet_nodes.assign(nodes.begin(), nodes.end());
  return out;
}

ScalarSolution solve_scalar(const ScalarCase& c, const mesh::Mesh& mesh,
                            const ScalarSolveOptions& options) {
  const auto assembled = assemble_scalar(c, mesh, options.exec);
  const auto& sys = assembled.system;
  const auto layout = sys.layout();

  const CVector phi0 = pack_complex({&assembled.dirichlet_values}, layout);
  const CVector residual = sys.rhs - sys.apply(phi0);
  auto real = linalg::to_real(sys);
  for (int node : assembled.dirichlet_nodes) {
    for (int mode = 0; mode < c.n_modes; ++mode) {
      real.constrain(layout.index(node, 0, mode, 0));
      real.constrain(layout.index(node, 0, mode, 1));
    }
  }
  RVector b = linalg::to_real(residual, layout);
  for (int i = 0; i < b.size(); ++i) {
    if (real.constrained(i)) b[i] = 0.0;
  }

  ScalarSolution out;
  RVector x;
  if (options.solver == LinearSolverKind::direct) {
    x = linalg::direct_solve(real, b);
    out.converged = true;
    RVector ax(x.size());
    real.apply(x, ax, options.exec);
    const double bn = b.norm();
    out.relative_residual = bn > 0.0 ? (b - ax).norm() / bn : (b - ax).norm();
  } else {
    const auto pc = linalg::block_jacobi_preconditioner(real, options.exec);
    const auto result = linalg::gmres(
        [&](const RVector& in, RVector& y) { real.apply(in, y, options.exec); }, b,
        options.gmres, [&](const RVector& in, RVector& y) { pc.apply(in, y); });
    x = result.x;
    out.converged = result.converged;
    out.iterations = result.matvecs;
    out.relative_residual = result.relative_residual;
    if (!result.converged) {
      spdlog::warn("scalar solve: GMRES stopped at relative residual {:.3e} after {} matvecs",
                   result.relative_residual, result.matvecs);
    }
  }

  out.field = zero_field(mesh.n_nodes(), c.n_modes);
  unpack_complex(linalg::from_real(x, layout), layout, {&out.field});
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    out.field[node] += assembled.dirichlet_values[node];
  }
  // Dirichlet values are imposed exactly rather than through the sum.
  for (int node : assembled.dirichlet_nodes) out.field[node] = assembled.dirichlet_values[node];
  return out;
}

CoercivityComponents coercivity_probe(const ScalarCase& c, const mesh::Mesh& mesh,
                                      const SpectralField& w) {
  validate_case(c, mesh);
  if (static_cast<int>(w.size()) != mesh.n_nodes()) {
    throw InvalidInput("coercivity probe: field size does not match mesh");
  }
  const VelocityField vel = effective_velocity(c, mesh);
  const double c_i = effective_c_i(c, mesh);
  const int nv = mesh.nodes_per_element();
  const int m = 2 * c.n_modes - 1;

  double scale = 0.0;
  for (const auto& v : w) scale = std::max(scale, v.max_abs());
  for (int node : mesh::group_nodes(mesh, [&] {
         std::vector<std::string> g;
         for (const auto& [name, fn] : c.dirichlet) g.push_back(name);
         return g;
       }())) {
    if (w[node].max_abs() > 1e-14 * std::max(scale, 1.0)) {
      throw InvalidInput("coercivity probe: trial field is nonzero on a Dirichlet node");
    }
  }

  CoercivityComponents out;
  const CMatrix omega = spectral::build_omega(c.n_modes, c.omega).dense();
  // Volume terms use the assembly rule so they match b(w, w) exactly; tau
  // is not polynomial in x.
  const auto& rule = mesh::assembly_rule(mesh.type());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    for (const auto& q : mesh::shape_eval(mesh, e, rule)) {
      const auto a = convolution_at(vel, conn, nv, q.values);
      const CVector wq = interpolate_field(w, conn, nv, q.values).to_vector();
      CVector r = omega * wq;
      for (int i = 0; i < mesh.dim; ++i) {
        CVector gi = CVector::Zero(m);
        for (int b = 0; b < nv; ++b) gi += q.grads(b, i) * w[conn[b]].to_vector();
        out.diffusive += q.weight * c.kappa * gi.squaredNorm();
        r += a[i] * gi;
      }
      if (!c.galerkin_only) {
        const auto tau = spectral::compute_tau(a, q.metric, c.kappa, c_i);
        out.least_squares += q.weight * (tau.sqrt_tau * r).squaredNorm();
      }
    }
  }

  const auto& frule = mesh::facet_error_rule(mesh.type());
  for (const auto& name : natural_groups(c, mesh)) {
    for (const auto& facet : mesh.group(name)) {
      const auto geo = mesh::facet_normal_area(mesh, facet);
      const auto& conn = mesh.elements[facet.element];
      for (int qi = 0; qi < frule.size(); ++qi) {
        Point x;
        const auto n = facet_shape_values(mesh, facet, frule.points[qi], x);
        const CMatrix an = normal_convolution(convolution_at(vel, conn, nv, n), geo.normal);
        const auto eig = spectral::hermitian_eig(an);
        if (eig.eigenvalues[0] < -1e-12 * std::max(1.0, an.norm())) {
          throw InvalidInput("coercivity probe: inflow on natural boundary '" + name +
                             "' (backflow present)");
        }
        const CVector wq = interpolate_field(w, conn, nv, n).to_vector();
        out.boundary +=
            0.5 * frule.weights[qi] * geo.measure * wq.dot(an * wq).real();
      }
    }
  }

  ScalarCase plain = c;
  plain.neumann.clear();
  plain.source = nullptr;
  const auto sys = assemble_scalar(plain, mesh, Execution::serial).system;
  const CVector wc = pack_complex({&w}, sys.layout());
  const cplx bww = wc.dot(sys.apply(wc));
  out.re_b = bww.real();
  out.im_b = bww.imag();
  return out;
}

std::vector<double> reconstruct_in_time(const SpectralField& f, double omega, double t) {
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = spectral::evaluate_in_time(f[k], omega, t);
  return out;
}

}  // namespace tsgls::scalar
