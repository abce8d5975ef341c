#include <cmath>

#include <spdlog/spdlog.h>

#include "tsgls/linalg/preconditioner.hpp"
#include "tsgls/ns/ns_solver.hpp"

namespace tsgls::ns {

namespace {

struct Linearized {
  RVector step;
  bool accepted = true;
  long iterations = 0;
  double relative_residual = 0.0;
};

Linearized solve_linear(const linalg::BlockTangent& t, const RVector& b, const SolverConfig& cfg) {
  Linearized out;
  if (cfg.linear_solver == LinearSolver::direct) {
    out.step = linalg::direct_solve(t, b);
    return out;
  }
  const auto pc = linalg::block_jacobi_preconditioner(t, cfg.exec);
  linalg::GmresConfig g{cfg.krylov_dim, cfg.eps_ls, cfg.max_linear_iters};
  const auto res = linalg::gmres([&](const RVector& x, RVector& y) { t.apply(x, y, cfg.exec); }, b,
                                 g, [&](const RVector& x, RVector& y) { pc.apply(x, y); });
  out.step = res.x;
  out.iterations = res.matvecs;
  out.relative_residual = res.relative_residual;
  if (!res.converged) {
    // Stagnation: no reduction at all means the step is useless.
    out.accepted = res.relative_residual < 0.999;
    spdlog::warn("flow solve: GMRES stopped at relative residual {:.3e} after {} matvecs{}",
                 res.relative_residual, res.matvecs, out.accepted ? "" : ", step rejected");
  }
  return out;
}

// Residual norm over free rows: Dirichlet momentum rows and imaginary
// mode-0 slots excluded.
double free_norm(const CVector& r, const linalg::RealLayout& layout,
                 const std::map<int, std::vector<spectral::SpectralCoeffs>>& dirichlet, int dim) {
  RVector v = linalg::to_real(r, layout);
  for (const auto& [node, vals] : dirichlet) {
    for (int i = 0; i < dim; ++i) {
      v.segment(layout.index(node, i, 0, 0), 2 * layout.n_modes).setZero();
    }
  }
  return v.norm();
}

void impose_dirichlet(NSState& s, const std::map<int, std::vector<spectral::SpectralCoeffs>>& d) {
  for (const auto& [node, v] : d) {
    for (int i = 0; i < s.dim; ++i) s.velocity[i][node] = v[i];
  }
}

StepResult step_impl(const NSCase& c, const mesh::Mesh& mesh, const NSState& state,
                     const SolverConfig& cfg, const CVector& r,
                     const std::map<int, std::vector<spectral::SpectralCoeffs>>& dirichlet,
                     CVector& r_new) {
  const double pdt = cfg.pseudo_dt == 0.0 ? default_pseudo_dt(c) : cfg.pseudo_dt;
  const auto t = assemble_ns_tangent(c, mesh, state, pdt, cfg.c1, cfg.full_tangent, cfg.exec);
  const RVector b = constrained_residual(r, t);
  auto lin = solve_linear(t, b, cfg);

  StepResult out;
  out.linear_iterations = lin.iterations;
  out.linear_residual = lin.relative_residual;
  out.accepted = lin.accepted;
  if (!lin.accepted) {
    out.state = state;
    r_new = r;
    out.residual_norm = free_norm(r, state.layout(), dirichlet, mesh.dim);
    return out;
  }
  for (Eigen::Index i = 0; i < lin.step.size(); ++i) {
    if (t.constrained(static_cast<int>(i))) lin.step[i] = 0.0;
  }
  out.state = state;
  out.state.unpack(state.pack() - linalg::from_real(lin.step, t.layout()));
  impose_dirichlet(out.state, dirichlet);
  r_new = assemble_ns_residual(c, mesh, out.state, {cfg.exec, nullptr});
  out.residual_norm = free_norm(r_new, out.state.layout(), dirichlet, mesh.dim);
  return out;
}

}  // namespace

StepResult newton_step(const NSCase& c, const mesh::Mesh& mesh, const NSState& state,
                       const SolverConfig& config) {
  config.validate();
  const auto dirichlet = dirichlet_values(c, mesh);
  const CVector r = assemble_ns_residual(c, mesh, state, {config.exec, nullptr});
  CVector r_new;
  return step_impl(c, mesh, state, config, r, dirichlet, r_new);
}

SolveResult solve_ns(const NSCase& c, const mesh::Mesh& mesh, const SolverConfig& config) {
  return solve_ns(c, mesh, config, initial_state(c, mesh));
}

SolveResult solve_ns(const NSCase& c, const mesh::Mesh& mesh, const SolverConfig& config,
                     NSState start) {
  config.validate();
  validate_case(c, mesh);
  const auto dirichlet = dirichlet_values(c, mesh);
  impose_dirichlet(start, dirichlet);

  SolveResult out;
  out.state = std::move(start);
  CVector r = assemble_ns_residual(c, mesh, out.state, {config.exec, nullptr});
  const double r0 = free_norm(r, out.state.layout(), dirichlet, mesh.dim);
  out.residual_history.push_back(r0);
  if (r0 == 0.0) {
    out.converged = true;
    return out;
  }
  for (int step = 1; step <= config.max_steps; ++step) {
    CVector r_new;
    auto s = step_impl(c, mesh, out.state, config, r, dirichlet, r_new);
    out.linear_iterations += s.linear_iterations;
    if (!s.accepted) {
      spdlog::warn("flow solve: stopped at step {} after a rejected linear solve", step);
      break;
    }
    out.state = std::move(s.state);
    r = std::move(r_new);
    out.steps = step;
    out.residual_history.push_back(s.residual_norm);
    spdlog::debug("flow solve: step {} residual {:.3e} ({} matvecs)", step,
                  s.residual_norm / r0, s.linear_iterations);
    if (!std::isfinite(s.residual_norm)) throw NumericalError("flow solve: residual is not finite");
    if (s.residual_norm <= config.eps_nr * r0) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    spdlog::warn("flow solve: not converged after {} steps (relative residual {:.3e})", out.steps,
                 out.residual_history.back() / r0);
  }
  return out;
}

}  // namespace tsgls::ns
