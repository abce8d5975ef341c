#include <cmath>

#include "tsgls/assembly.hpp"
#include "tsgls/linalg/graph.hpp"
#include "tsgls/mesh/quadrature.hpp"
#include "tsgls/mesh/shape.hpp"
#include "tsgls/ns/ns_solver.hpp"
#include "tsgls/spectral/matrices.hpp"
#include "tsgls/spectral/tau.hpp"

namespace tsgls::ns {

namespace {

struct Fields {
  VelocityField advecting;
  const NSState* state;
  CMatrix omega;
  double c_i;
};

Fields make_fields(const NSCase& c, const mesh::Mesh& mesh, const NSState& state,
                   const NSState* frozen) {
  validate_case(c, mesh);
  if (state.dim != mesh.dim || state.n_modes != c.n_modes ||
      static_cast<int>(state.pressure.size()) != mesh.n_nodes()) {
    throw InvalidInput("flow state does not match mesh and mode count");
  }
  Fields f{velocity_field(frozen ? *frozen : state), &state,
           spectral::build_omega(c.n_modes, c.omega).dense(),
           c.c_i > 0.0 ? c.c_i : mesh::default_c_i(mesh.type())};
  return f;
}

// Per-element buffers. Residual in local order (a, comp, mode); matrices
// per node pair ab = a * nv + b.
struct ElementWork {
  CVector r;
  std::vector<CMatrix> k, l, g_full, d_full;
  std::vector<double> g, d, mass;
};

struct QpData {
  std::vector<CMatrix> a;  // convection matrices per direction
  spectral::TauMatrix tau;
  std::vector<CMatrix> e;  // E_b = Omega N_b + A_k dN_b/dx_k
};

void qp_common(const Fields& f, const NSCase& c, const mesh::Mesh& mesh,
               const mesh::Connectivity& conn, const mesh::ShapeEval& q, QpData& d) {
  const int nv = mesh.nodes_per_element();
  d.a = convolution_at(f.advecting, conn, nv, q.values);
  d.tau = spectral::compute_tau(d.a, q.metric, c.nu(), f.c_i);
  d.e.resize(nv);
  for (int b = 0; b < nv; ++b) {
    d.e[b] = q.values[b] * f.omega;
    for (int k = 0; k < mesh.dim; ++k) d.e[b] += q.grads(b, k) * d.a[k];
  }
}

void residual_kernel(const Fields& f, const NSCase& c, const mesh::Mesh& mesh, int e,
                     ElementWork& w) {
  const int nv = mesh.nodes_per_element();
  const int dim = mesh.dim;
  const int m = 2 * c.n_modes - 1;
  const int nc = dim + 1;
  const auto& conn = mesh.elements[e];
  const auto& s = *f.state;
  w.r.setZero(nv * nc * m);
  QpData d;
  std::vector<CVector> u(dim), gp(dim), tr(dim);
  std::vector<std::vector<CVector>> gu(dim, std::vector<CVector>(dim));
  for (const auto& q : mesh::shape_eval(mesh, e, mesh::assembly_rule(mesh.type()))) {
    qp_common(f, c, mesh, conn, q, d);
    CVector p = CVector::Zero(m);
    for (int i = 0; i < dim; ++i) {
      u[i] = CVector::Zero(m);
      gp[i] = CVector::Zero(m);
      for (int j = 0; j < dim; ++j) gu[i][j] = CVector::Zero(m);
    }
    for (int b = 0; b < nv; ++b) {
      const CVector pb = s.pressure[conn[b]].to_vector();
      p += q.values[b] * pb;
      for (int i = 0; i < dim; ++i) {
        const CVector ub = s.velocity[i][conn[b]].to_vector();
        u[i] += q.values[b] * ub;
        gp[i] += q.grads(b, i) * pb;
        for (int j = 0; j < dim; ++j) gu[i][j] += q.grads(b, j) * ub;
      }
    }
    CVector div = CVector::Zero(m);
    std::vector<CVector> conv(dim);
    for (int i = 0; i < dim; ++i) {
      conv[i] = f.omega * u[i];
      for (int j = 0; j < dim; ++j) conv[i] += d.a[j] * gu[i][j];
      tr[i] = d.tau.tau * (c.rho * conv[i] + gp[i]);
      div += gu[i][i];
    }
    for (int a = 0; a < nv; ++a) {
      for (int i = 0; i < dim; ++i) {
        auto seg = w.r.segment((a * nc + i) * m, m);
        CVector gal = c.rho * q.values[a] * conv[i] - q.grads(a, i) * p;
        for (int j = 0; j < dim; ++j) gal += c.mu * q.grads(a, j) * gu[i][j];
        seg += q.weight * (gal + d.e[a].adjoint() * tr[i]);
      }
      auto seg = w.r.segment((a * nc + dim) * m, m);
      CVector cont = q.values[a] * div;
      for (int i = 0; i < dim; ++i) cont += (q.grads(a, i) / c.rho) * tr[i];
      seg += q.weight * cont;
    }
  }
}

void tangent_kernel(const Fields& f, const NSCase& c, const mesh::Mesh& mesh, int e, bool full,
                    ElementWork& w) {
  const int nv = mesh.nodes_per_element();
  const int dim = mesh.dim;
  const int m = 2 * c.n_modes - 1;
  const auto& conn = mesh.elements[e];
  const int pairs = nv * nv;
  w.k.assign(pairs, CMatrix::Zero(m, m));
  w.l.assign(pairs, CMatrix::Zero(m, m));
  w.mass.assign(pairs, 0.0);
  w.g.assign(pairs * dim, 0.0);
  w.d.assign(pairs * dim, 0.0);
  if (full) {
    w.g_full.assign(pairs * dim, CMatrix::Zero(m, m));
    w.d_full.assign(pairs * dim, CMatrix::Zero(m, m));
  }
  QpData d;
  std::vector<CMatrix> te(nv);
  for (const auto& q : mesh::shape_eval(mesh, e, mesh::assembly_rule(mesh.type()))) {
    qp_common(f, c, mesh, conn, q, d);
    const CMatrix& tau = d.tau.tau;
    for (int b = 0; b < nv; ++b) te[b] = tau * d.e[b];
    for (int a = 0; a < nv; ++a) {
      for (int b = 0; b < nv; ++b) {
        const int ab = a * nv + b;
        const double wa = q.weight * q.values[a];
        w.k[ab] += (c.rho * wa) * d.e[b];
        const double gg = q.grads.row(a).dot(q.grads.row(b));
        w.k[ab].diagonal().array() += q.weight * c.mu * gg;
        w.mass[ab] += wa * q.values[b];
        w.l[ab] += (q.weight * gg / c.rho) * tau;
        if (b >= a) {
          const CMatrix ls = (c.rho * q.weight) * (d.e[a].adjoint() * te[b]);
          w.k[ab] += ls;
          if (b != a) w.k[b * nv + a] += ls.adjoint();
        }
        for (int i = 0; i < dim; ++i) {
          w.g[ab * dim + i] -= q.weight * q.grads(a, i) * q.values[b];
          w.d[ab * dim + i] += wa * q.grads(b, i);
          if (full) {
            w.g_full[ab * dim + i] += (q.weight * q.grads(b, i)) * te[a].adjoint();
            w.d_full[ab * dim + i] += (q.weight * q.grads(a, i)) * te[b];
          }
        }
      }
    }
  }
  if (full) {
    for (int ab = 0; ab < pairs; ++ab) {
      for (int i = 0; i < dim; ++i) {
        w.g_full[ab * dim + i].diagonal().array() += w.g[ab * dim + i];
        w.d_full[ab * dim + i].diagonal().array() += w.d[ab * dim + i];
      }
    }
  }
}

std::vector<std::string> natural_groups(const NSCase& c) {
  std::vector<std::string> out;
  for (const auto& [name, fn] : c.neumann) out.push_back(name);
  return out;
}

// Calls fn(facet, conn, shape values, weight, A_n, normal) at every
// quadrature point of every Neumann facet.
template <class Fn>
void for_neumann_points(const NSCase& c, const mesh::Mesh& mesh, const Fields& f, Fn&& fn) {
  const auto& rule = mesh::facet_rule(mesh.type());
  const int nv = mesh.nodes_per_element();
  for (const auto& name : natural_groups(c)) {
    for (const auto& facet : mesh.group(name)) {
      const auto geo = mesh::facet_normal_area(mesh, facet);
      const auto& conn = mesh.elements[facet.element];
      for (int q = 0; q < rule.size(); ++q) {
        Point x;
        const auto n = facet_shape_values(mesh, facet, rule.points[q], x);
        const CMatrix an = normal_convolution(convolution_at(f.advecting, conn, nv, n), geo.normal);
        fn(name, conn, n, x, rule.weights[q] * geo.measure, an, geo.normal);
      }
    }
  }
}

}  // namespace

CVector assemble_ns_residual(const NSCase& c, const mesh::Mesh& mesh, const NSState& state,
                             const AssemblyOptions& options) {
  const Fields f = make_fields(c, mesh, state, options.frozen);
  const auto layout = state.layout();
  const int nv = mesh.nodes_per_element();
  const int m = 2 * c.n_modes - 1;
  const int nc = mesh.dim + 1;
  CVector r = CVector::Zero(layout.complex_size());
  element_loop<ElementWork>(
      mesh.n_elements(), options.exec,
      [&](int e, ElementWork& w) { residual_kernel(f, c, mesh, e, w); },
      [&](int e, const ElementWork& w) {
        const auto& conn = mesh.elements[e];
        for (int a = 0; a < nv; ++a) {
          for (int comp = 0; comp < nc; ++comp) {
            r.segment(layout.complex_index(conn[a], comp, -c.n_modes + 1), m) +=
                w.r.segment((a * nc + comp) * m, m);
          }
        }
      });

  for_neumann_points(c, mesh, f, [&](const std::string& name, const mesh::Connectivity& conn,
                                     const std::array<double, 4>& n, const Point& x, double w,
                                     const CMatrix& an, const Point& normal) {
    const CVector h = c.neumann.at(name)(x).to_vector();
    if (h.size() != m) throw InvalidInput("Neumann data for '" + name + "' has the wrong mode count");
    const CMatrix bf = backflow_matrix(an, c.rho, c.backflow_beta);
    const bool active = !bf.isZero(0.0);
    for (int a = 0; a < nv; ++a) {
      if (n[a] == 0.0) continue;
      for (int i = 0; i < mesh.dim; ++i) {
        auto seg = r.segment(layout.complex_index(conn[a], i, -c.n_modes + 1), m);
        seg -= (w * n[a] * normal[i]) * h;
        if (active) {
          const CVector ui = interpolate_field(state.velocity[i], conn, nv, n).to_vector();
          seg -= (w * n[a]) * (bf * ui);
        }
      }
    }
  });
  return r;
}

RVector constrained_residual(const CVector& r, const linalg::BlockTangent& tangent) {
  RVector out = linalg::to_real(r, tangent.layout());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (tangent.constrained(static_cast<int>(i))) out[i] = 0.0;
  }
  return out;
}

linalg::BlockTangent assemble_ns_tangent(const NSCase& c, const mesh::Mesh& mesh,
                                         const NSState& state, double pseudo_dt, double c1,
                                         bool full_coupling, Execution exec) {
  const Fields f = make_fields(c, mesh, state, nullptr);
  if (!(pseudo_dt > 0.0)) throw InvalidInput("tangent: pseudo time step must be > 0");
  const int nv = mesh.nodes_per_element();
  const int dim = mesh.dim;
  const double mass_coef = std::isinf(pseudo_dt) ? 0.0 : c1 * c.rho / pseudo_dt;

  auto graph = linalg::build_node_graph(mesh);
  const auto edges = linalg::element_edge_map(mesh, graph);
  linalg::BlockTangent t(std::move(graph), dim, c.n_modes, full_coupling);
  const auto layout = t.layout();

  element_loop<ElementWork>(
      mesh.n_elements(), exec,
      [&](int e, ElementWork& w) {
        tangent_kernel(f, c, mesh, e, full_coupling, w);
        if (mass_coef != 0.0) {
          for (std::size_t ab = 0; ab < w.k.size(); ++ab) {
            w.k[ab].diagonal().array() += mass_coef * w.mass[ab];
          }
        }
      },
      [&](int e, const ElementWork& w) {
        for (int a = 0; a < nv; ++a) {
          for (int b = 0; b < nv; ++b) {
            const int ab = a * nv + b;
            const int edge = edges[e][ab];
            t.k(edge) += linalg::real_map_block(w.k[ab]);
            t.l(edge) += linalg::real_map_block(w.l[ab]);
            for (int i = 0; i < dim; ++i) {
              if (full_coupling) {
                t.g_full(edge, i) += linalg::real_map_block(w.g_full[ab * dim + i]);
                t.d_full(edge, i) += linalg::real_map_block(w.d_full[ab * dim + i]);
              } else {
                t.g(edge, i).array() += w.g[ab * dim + i];
                t.d(edge, i).array() += w.d[ab * dim + i];
              }
            }
          }
        }
      });

  if (c.backflow_beta > 0.0) {
    for_neumann_points(c, mesh, f, [&](const std::string&, const mesh::Connectivity& conn,
                                       const std::array<double, 4>& n, const Point&, double w,
                                       const CMatrix& an, const Point&) {
      const CMatrix bf = backflow_matrix(an, c.rho, c.backflow_beta);
      if (bf.isZero(0.0)) return;
      for (int a = 0; a < nv; ++a) {
        for (int b = 0; b < nv; ++b) {
          if (n[a] == 0.0 || n[b] == 0.0) continue;
          const int edge = t.graph().find(conn[a], conn[b]);
          t.k(edge) -= linalg::real_map_block((w * n[a] * n[b]) * bf);
        }
      }
    });
  }

  for (const auto& [node, v] : dirichlet_values(c, mesh)) {
    for (int i = 0; i < dim; ++i) {
      for (int mode = 0; mode < c.n_modes; ++mode) {
        t.constrain(layout.index(node, i, mode, 0));
        t.constrain(layout.index(node, i, mode, 1));
      }
    }
  }
  return t;
}

}  // namespace tsgls::ns
