#include <algorithm>
#include <cmath>

#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include "tsgls/assembly.hpp"
#include "tsgls/mesh/quadrature.hpp"
#include "tsgls/mesh/shape.hpp"
#include "tsgls/time/time_solver.hpp"

namespace tsgls::transient {

using SpMat = Eigen::SparseMatrix<double>;

struct TimeStepper::Impl {
  SpMat pattern;
  // Value slot of every local entry, element-major, row-major within.
  std::vector<std::vector<int>> slots;
  std::vector<int> diagonal_slot;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
};

namespace {

struct ElementWork {
  RMatrix k;
  RVector r;
};

// Interpolated quantities at the generalized-alpha intermediate instants.
struct Intermediate {
  std::vector<RVector> u;  // u_{n+alpha_f}
  std::vector<RVector> a;  // a_{n+alpha_m}
  const RVector* p;        // p_{n+alpha_f}
};

}  // namespace

TimeStepper::TimeStepper(TimeCase c, const mesh::Mesh& mesh, TimeSolverConfig config)
    : case_(std::move(c)), mesh_(&mesh), config_(config), dim_(mesh.dim),
      impl_(std::make_unique<Impl>()) {
  validate_case(case_, mesh);
  config_.validate();

  int gi = 0;
  for (const auto& [name, fn] : case_.dirichlet) {
    for (int node : mesh::group_nodes(mesh, {name})) dirichlet_owner_[node] = gi;
    dirichlet_groups_.push_back(name);
    ++gi;
  }
  for (int node : mesh::group_nodes(mesh, case_.walls)) dirichlet_owner_[node] = -1;

  const int nv = mesh.nodes_per_element();
  const int nc = dim_ + 1;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.n_elements()) * nv * nv * nc * nc);
  for (const auto& conn : mesh.elements) {
    for (int a = 0; a < nv; ++a) {
      for (int b = 0; b < nv; ++b) {
        for (int ci = 0; ci < nc; ++ci) {
          for (int cj = 0; cj < nc; ++cj) trip.emplace_back(dof(conn[a], ci), dof(conn[b], cj), 0.0);
        }
      }
    }
  }
  impl_->pattern.resize(n_dofs(), n_dofs());
  impl_->pattern.setFromTriplets(trip.begin(), trip.end());
  impl_->pattern.makeCompressed();

  auto slot = [&](int row, int col) {
    const int* outer = impl_->pattern.outerIndexPtr();
    const int* inner = impl_->pattern.innerIndexPtr();
    const int* begin = inner + outer[col];
    const int* end = inner + outer[col + 1];
    const int* it = std::lower_bound(begin, end, row);
    return static_cast<int>(it - inner);
  };
  const int nd = nv * nc;
  impl_->slots.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    auto& s = impl_->slots[e];
    s.resize(static_cast<std::size_t>(nd) * nd);
    for (int r = 0; r < nd; ++r) {
      for (int cidx = 0; cidx < nd; ++cidx) {
        s[r * nd + cidx] = slot(dof(conn[r / nc], r % nc), dof(conn[cidx / nc], cidx % nc));
      }
    }
  }
  impl_->diagonal_slot.resize(n_dofs());
  for (int i = 0; i < n_dofs(); ++i) impl_->diagonal_slot[i] = slot(i, i);
}

TimeStepper::~TimeStepper() = default;

std::vector<double> TimeStepper::dirichlet_value(int node, double t) const {
  const int owner = dirichlet_owner_.at(node);
  if (owner < 0) return std::vector<double>(dim_, 0.0);
  const auto v = case_.dirichlet.at(dirichlet_groups_[owner])(node, mesh_->coords[node], t);
  if (static_cast<int>(v.size()) != dim_) {
    throw InvalidInput("Dirichlet data for '" + dirichlet_groups_[owner] +
                       "' has the wrong number of components");
  }
  return v;
}

TimeState TimeStepper::predict(const TimeState& state, double ramp) const {
  const double dt = case_.dt();
  const double gamma = config_.alpha.gamma();
  TimeState next = state;
  next.t = state.t + dt;
  for (int i = 0; i < dim_; ++i) {
    next.acceleration[i] = ((gamma - 1.0) / gamma) * state.acceleration[i];
    // u_{n+1} = u_n + dt ((1 - gamma) a_n + gamma a_{n+1}) = u_n here
    next.velocity[i] = state.velocity[i];
  }
  for (const auto& [node, owner] : dirichlet_owner_) {
    const auto g = dirichlet_value(node, next.t);
    for (int i = 0; i < dim_; ++i) {
      const double u = ramp * g[i];
      next.velocity[i][node] = u;
      next.acceleration[i][node] =
          (u - state.velocity[i][node] - dt * (1.0 - gamma) * state.acceleration[i][node]) /
          (gamma * dt);
    }
  }
  return next;
}

void TimeStepper::update(TimeState& iterate, const RVector& delta) const {
  const double gdt = config_.alpha.gamma() * case_.dt();
  for (int node = 0; node < mesh_->n_nodes(); ++node) {
    if (!dirichlet_owner_.count(node)) {
      for (int i = 0; i < dim_; ++i) {
        const double d = delta[dof(node, i)];
        iterate.acceleration[i][node] += d;
        iterate.velocity[i][node] += gdt * d;
      }
    }
    iterate.pressure[node] += delta[dof(node, dim_)];
  }
}

void TimeStepper::assemble(const TimeState& previous, const TimeState& iterate, double oh,
                           RVector* r_out, SpMat* j_out) const {
  const auto& mesh = *mesh_;
  const int nv = mesh.nodes_per_element();
  const int dim = dim_;
  const int nc = dim + 1;
  const int nd = nv * nc;
  const double af = config_.alpha.alpha_f();
  const double am = config_.alpha.alpha_m();
  const double cu = af * config_.alpha.gamma() * case_.dt();  // du_{n+af} / da_{n+1}
  const double ca = am;                                       // da_{n+am} / da_{n+1}
  const double rho = case_.rho;
  const double mu = case_.mu;
  const double nu = case_.nu();
  const double c_i = case_.c_i > 0.0 ? case_.c_i : mesh::default_c_i(mesh.type());
  const bool want_j = j_out != nullptr;

  const RVector p_mid = previous.pressure + af * (iterate.pressure - previous.pressure);
  const double cp = af;  // dp_{n+af} / dp_{n+1}
  Intermediate mid{{}, {}, &p_mid};
  for (int i = 0; i < dim; ++i) {
    mid.u.push_back(previous.velocity[i] + af * (iterate.velocity[i] - previous.velocity[i]));
    mid.a.push_back(previous.acceleration[i] +
                    am * (iterate.acceleration[i] - previous.acceleration[i]));
  }

  RVector r = RVector::Zero(n_dofs());
  SpMat j;
  if (want_j) {
    j = impl_->pattern;
    std::fill(j.valuePtr(), j.valuePtr() + j.nonZeros(), 0.0);
  }
  auto is_fixed_row = [&](int node, int comp) {
    return comp < dim && dirichlet_owner_.count(node) > 0;
  };

  element_loop<ElementWork>(
      mesh.n_elements(), config_.exec,
      [&](int e, ElementWork& w) {
        const auto& conn = mesh.elements[e];
        w.r.setZero(nd);
        if (want_j) w.k.setZero(nd, nd);
        double u[3], a[3], gp[3], rs[3], gu[3][3];
        double ua[4];
        for (const auto& q : mesh::shape_eval(mesh, e, mesh::assembly_rule(mesh.type()))) {
          double p = 0.0;
          for (int i = 0; i < dim; ++i) {
            u[i] = a[i] = gp[i] = 0.0;
            for (int k = 0; k < dim; ++k) gu[i][k] = 0.0;
          }
          for (int b = 0; b < nv; ++b) {
            const int node = conn[b];
            const double pb = (*mid.p)[node];
            p += q.values[b] * pb;
            for (int i = 0; i < dim; ++i) {
              const double ub = mid.u[i][node];
              u[i] += q.values[b] * ub;
              a[i] += q.values[b] * mid.a[i][node];
              gp[i] += q.grads(b, i) * pb;
              for (int k = 0; k < dim; ++k) gu[i][k] += q.grads(b, k) * ub;
            }
          }
          const double tau = time_tau(std::span<const double>(u, dim), oh, q.metric, nu, c_i);
          double div = 0.0;
          for (int i = 0; i < dim; ++i) {
            double conv = 0.0;
            for (int k = 0; k < dim; ++k) conv += u[k] * gu[i][k];
            rs[i] = rho * (a[i] + conv) + gp[i];
            div += gu[i][i];
          }
          for (int b = 0; b < nv; ++b) {
            ua[b] = 0.0;
            for (int k = 0; k < dim; ++k) ua[b] += u[k] * q.grads(b, k);
          }
          const double wq = q.weight;
          for (int A = 0; A < nv; ++A) {
            const double na = q.values[A];
            for (int i = 0; i < dim; ++i) {
              double gal = na * (rs[i] - gp[i]) - q.grads(A, i) * p;
              for (int k = 0; k < dim; ++k) gal += mu * q.grads(A, k) * gu[i][k];
              w.r[A * nc + i] += wq * (gal + ua[A] * tau * rs[i]);
            }
            double cont = na * div;
            for (int i = 0; i < dim; ++i) cont += q.grads(A, i) / rho * tau * rs[i];
            w.r[A * nc + dim] += wq * cont;
          }
          if (!want_j) continue;
          // d tau / d u_k = -tau^3 (G u)_k
          double dtau[3];
          for (int k = 0; k < dim; ++k) {
            double gu_k = 0.0;
            for (int l = 0; l < dim; ++l) gu_k += q.metric(k, l) * u[l];
            dtau[k] = -tau * tau * tau * gu_k;
          }
          for (int A = 0; A < nv; ++A) {
            const double na = q.values[A];
            for (int B = 0; B < nv; ++B) {
              const double nb = q.values[B];
              double gg = 0.0;
              for (int k = 0; k < dim; ++k) gg += q.grads(A, k) * q.grads(B, k);
              for (int i = 0; i < dim; ++i) {
                const int row = A * nc + i;
                for (int jj = 0; jj < dim; ++jj) {
                  // d r_i / d a_{B,jj}
                  double dr = rho * cu * nb * gu[i][jj];
                  if (i == jj) dr += rho * (ca * nb + cu * ua[B]);
                  const double dt_b = cu * nb * dtau[jj];
                  double v = na * dr + ua[A] * (tau * dr + dt_b * rs[i]) +
                             cu * nb * q.grads(A, jj) * tau * rs[i];
                  if (i == jj) v += cu * mu * gg;
                  w.k(row, B * nc + jj) += wq * v;
                  w.k(A * nc + dim, B * nc + jj) +=
                      wq * q.grads(A, i) / rho * (tau * dr + dt_b * rs[i]);
                }
                w.k(row, B * nc + dim) +=
                    wq * cp * (-q.grads(A, i) * nb + ua[A] * tau * q.grads(B, i));
              }
              for (int jj = 0; jj < dim; ++jj) {
                w.k(A * nc + dim, B * nc + jj) += wq * cu * na * q.grads(B, jj);
              }
              w.k(A * nc + dim, B * nc + dim) += wq * cp * tau / rho * gg;
            }
          }
        }
      },
      [&](int e, const ElementWork& w) {
        const auto& conn = mesh.elements[e];
        for (int rl = 0; rl < nd; ++rl) {
          const int node = conn[rl / nc];
          const int comp = rl % nc;
          if (is_fixed_row(node, comp)) continue;
          r[dof(node, comp)] += w.r[rl];
          if (!want_j) continue;
          const auto& slots = impl_->slots[e];
          for (int cl = 0; cl < nd; ++cl) j.valuePtr()[slots[rl * nd + cl]] += w.k(rl, cl);
        }
      });

  // Traction and backflow on natural boundaries, data at t_{n+alpha_f}.
  const double t_mid = previous.t + af * case_.dt();
  const auto& rule = mesh::facet_rule(mesh.type());
  for (const auto& [name, h_fn] : case_.neumann) {
    for (const auto& facet : mesh.group(name)) {
      const auto geo = mesh::facet_normal_area(mesh, facet);
      const auto& conn = mesh.elements[facet.element];
      for (int q = 0; q < rule.size(); ++q) {
        Point x;
        const auto n = facet_shape_values(mesh, facet, rule.points[q], x);
        const double w = rule.weights[q] * geo.measure;
        const double h = h_fn(x, t_mid);
        double uq[3] = {0.0, 0.0, 0.0};
        double un = 0.0;
        for (int i = 0; i < dim; ++i) {
          for (int b = 0; b < nv; ++b) uq[i] += n[b] * mid.u[i][conn[b]];
          un += uq[i] * geo.normal[i];
        }
        const double bf = 0.5 * rho * case_.backflow_beta * std::min(un, 0.0);
        const double dbf = un < 0.0 ? 0.5 * rho * case_.backflow_beta : 0.0;  // d bf / d u_n
        for (int A = 0; A < nv; ++A) {
          if (n[A] == 0.0) continue;
          for (int i = 0; i < dim; ++i) {
            if (is_fixed_row(conn[A], i)) continue;
            r[dof(conn[A], i)] -= w * n[A] * (h * geo.normal[i] + bf * uq[i]);
            if (!want_j || bf == 0.0) continue;
            for (int B = 0; B < nv; ++B) {
              if (n[B] == 0.0) continue;
              for (int jj = 0; jj < dim; ++jj) {
                double v = dbf * uq[i] * geo.normal[jj];
                if (jj == i) v += bf;
                j.coeffRef(dof(conn[A], i), dof(conn[B], jj)) -= w * n[A] * n[B] * v * cu;
              }
            }
          }
        }
      }
    }
  }

  if (want_j) {
    for (const auto& [node, owner] : dirichlet_owner_) {
      for (int i = 0; i < dim; ++i) j.valuePtr()[impl_->diagonal_slot[dof(node, i)]] = 1.0;
    }
    *j_out = std::move(j);
  }
  if (r_out) *r_out = std::move(r);
}

RVector TimeStepper::residual(const TimeState& previous, const TimeState& iterate,
                              double oh) const {
  RVector r;
  assemble(previous, iterate, oh, &r, nullptr);
  return r;
}

SpMat TimeStepper::jacobian(const TimeState& previous, const TimeState& iterate, double oh) const {
  SpMat j;
  assemble(previous, iterate, oh, nullptr, &j);
  return j;
}

double TimeStepper::free_norm(const RVector& r) const { return r.norm(); }

StepOutcome TimeStepper::step(const TimeState& state, double ramp) {
  if (state.dim != dim_ || state.pressure.size() != mesh_->n_nodes()) {
    throw InvalidInput("time step: state does not match the mesh");
  }
  const double af = config_.alpha.alpha_f();
  const double am = config_.alpha.alpha_m();
  StepOutcome out;
  out.state = predict(state, ramp);

  auto current_omega_hat = [&](const TimeState& it) {
    if (!config_.use_omega_hat) return 0.0;
    std::vector<RVector> u;
    std::vector<RVector> a;
    for (int i = 0; i < dim_; ++i) {
      u.push_back(state.velocity[i] + af * (it.velocity[i] - state.velocity[i]));
      a.push_back(state.acceleration[i] + am * (it.acceleration[i] - state.acceleration[i]));
    }
    return omega_hat(*mesh_, u, a);
  };

  out.omega_hat = current_omega_hat(out.state);
  RVector r;
  SpMat j;
  assemble(state, out.state, out.omega_hat, &r, nullptr);
  const double r0 = free_norm(r);
  out.residual_history.push_back(r0);
  if (r0 <= config_.abs_tol) {
    out.converged = true;
    return out;
  }
  for (int it = 1; it <= config_.max_newton; ++it) {
    assemble(state, out.state, out.omega_hat, nullptr, &j);
    if (!impl_->analyzed) {
      impl_->lu.analyzePattern(j);
      impl_->analyzed = true;
    }
    impl_->lu.factorize(j);
    if (impl_->lu.info() != Eigen::Success) {
      throw NumericalError("time step: singular Jacobian at t = " + std::to_string(out.state.t));
    }
    const RVector delta = impl_->lu.solve(-r);
    update(out.state, delta);
    out.newton_iterations = it;
    out.omega_hat = current_omega_hat(out.state);
    assemble(state, out.state, out.omega_hat, &r, nullptr);
    const double norm = free_norm(r);
    out.residual_history.push_back(norm);
    if (!std::isfinite(norm)) throw NumericalError("time step: residual is not finite");
    if (norm <= config_.eps_nr * r0 || norm <= config_.abs_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

StepOutcome generalized_alpha_step(const TimeCase& c, const mesh::Mesh& mesh,
                                   const TimeState& state, const TimeSolverConfig& config) {
  TimeStepper stepper(c, mesh, config);
  return stepper.step(state);
}

}  // namespace tsgls::transient
