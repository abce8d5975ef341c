#include <doctest.h>

#include <cmath>
#include <random>

#include "tsgls/mesh/mesh.hpp"
#include "tsgls/scalar/scalar_solver.hpp"
#include "unit/common.hpp"

using namespace tsgls;
using namespace tsgls::scalar;
using spectral::SpectralCoeffs;
using testing_support::random_coeffs;

namespace {

SpectralCoeffs steady(int n_modes, double v) {
  SpectralCoeffs c(n_modes);
  c.set(0, v);
  return c;
}

VelocityField uniform_1d(const mesh::Mesh& m, int n_modes, double u) {
  return VelocityField::from_function(m, n_modes,
                                      [&](const Point&, int) { return steady(n_modes, u); });
}

// Steady 1D element matrix by hand: Galerkin convection, diffusion and the
// least-squares term with tau = (u^2 G + c kappa^2 G^2)^{-1/2}, G = 4/h^2.
Eigen::Matrix2d steady_element(double u, double kappa, double h, double c_i) {
  const double g = 4.0 / (h * h);
  const double tau = 1.0 / std::sqrt(u * u * g + c_i * kappa * kappa * g * g);
  Eigen::Matrix2d conv;
  conv << -0.5 * u, 0.5 * u, -0.5 * u, 0.5 * u;
  Eigen::Matrix2d lap;
  lap << 1.0, -1.0, -1.0, 1.0;
  return conv + (kappa / h) * lap + (tau * u * u / h) * lap;
}

}  // namespace

TEST_CASE("pure diffusion assembles the kappa/h stencil") {
  const auto m = mesh::generate_interval(1.0, 5);
  ScalarCase c;
  c.kappa = 0.3;
  c.dirichlet["left"] = constant_data(steady(1, 0.0));
  const auto sys = assemble_scalar(c, m).system;
  const double h = 0.2;
  const CMatrix dense = sys.dense();
  for (int i = 0; i < 6; ++i) {
    const double diag = (i == 0 || i == 5) ? 1.0 : 2.0;
    CHECK(std::abs(dense(i, i) - diag * c.kappa / h) < 1e-13);
    if (i + 1 < 6) CHECK(std::abs(dense(i, i + 1) + c.kappa / h) < 1e-13);
  }
}

TEST_CASE("steady stabilized stencil matches hand assembly") {
  const int n = 8;
  const double u = 2.0, kappa = 0.01, h = 1.0 / n;
  const auto m = mesh::generate_interval(1.0, n);
  ScalarCase c;
  c.kappa = kappa;
  c.velocity = uniform_1d(m, 1, u);
  c.dirichlet["left"] = constant_data(steady(1, 0.0));
  c.dirichlet["right"] = constant_data(steady(1, 1.0));
  const auto sys = assemble_scalar(c, m).system;
  const auto ke = steady_element(u, kappa, h, 9.0);
  Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int e = 0; e < n; ++e) oracle.block(e, e, 2, 2) += ke;
  CHECK((sys.dense().real() - oracle).norm() < 1e-12 * oracle.norm());

  // Dense solve with Dirichlet rows replaced by identity.
  Eigen::MatrixXd a = oracle;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  for (int r : {0, n}) {
    a.row(r).setZero();
    a(r, r) = 1.0;
  }
  b[n] = 1.0;
  const Eigen::VectorXd expected = a.fullPivLu().solve(b);
  for (auto kind : {LinearSolverKind::gmres, LinearSolverKind::direct}) {
    ScalarSolveOptions opt;
    opt.solver = kind;
    const auto sol = solve_scalar(c, m, opt);
    CHECK(sol.converged);
    for (int i = 0; i <= n; ++i) CHECK(std::abs(sol.field[i][0].real() - expected[i]) < 1e-9);
  }
}

TEST_CASE("Galerkin-only drops the least-squares term") {
  const auto m = mesh::generate_interval(1.0, 4);
  ScalarCase c;
  c.kappa = 0.05;
  c.velocity = uniform_1d(m, 1, 1.0);
  c.dirichlet["left"] = constant_data(steady(1, 0.0));
  c.galerkin_only = true;
  const auto stab = steady_element(1.0, 0.05, 0.25, 9.0);
  const auto sys = assemble_scalar(c, m).system;
  // Interior diagonal: convection cancels, diffusion only.
  CHECK(std::abs(sys.dense()(1, 1).real() - 2.0 * 0.05 / 0.25) < 1e-13);
  CHECK(std::abs(stab(0, 0) + stab(1, 1) - 2.0 * 0.05 / 0.25) > 1e-3);
}

TEST_CASE("diffusion with source and Neumann flux is nodally exact in 1D") {
  // -kappa phi'' = f, phi(0) = 0, kappa phi'(1) = q:
  // phi = (f/kappa)(x - x^2/2) + (q/kappa) x.
  const double kappa = 0.7, f = 1.3, q = -0.4;
  const auto m = mesh::generate_interval(1.0, 7);
  ScalarCase c;
  c.kappa = kappa;
  c.dirichlet["left"] = constant_data(steady(1, 0.0));
  c.neumann["right"] = constant_data(steady(1, q));
  c.source = constant_data(steady(1, f));
  ScalarSolveOptions opt;
  opt.solver = LinearSolverKind::direct;
  const auto sol = solve_scalar(c, m, opt);
  for (int i = 0; i < m.n_nodes(); ++i) {
    const double x = m.coords[i][0];
    CHECK(std::abs(sol.field[i][0].real() - ((f / kappa) * (x - 0.5 * x * x) + q * x / kappa)) <
          1e-12);
  }
}

TEST_CASE("steady velocity decouples the modes") {
  const int nm = 3;
  const auto m = mesh::generate_rectangle({0.0, 0.0}, {1.0, 0.5}, {6, 4});
  ScalarCase c;
  c.kappa = 0.02;
  c.omega = 2.0;
  c.n_modes = nm;
  c.velocity = VelocityField::from_function(m, nm, [&](const Point&, int i) {
    return steady(nm, i == 0 ? 1.0 : 0.3);
  });
  SpectralCoeffs in(nm);
  in.set(0, 1.0);
  in.set(1, {0.2, -0.1});
  c.dirichlet["xmin"] = constant_data(in);
  c.dirichlet["ymin"] = constant_data(steady(nm, 0.0));
  ScalarSolveOptions opt;
  opt.solver = LinearSolverKind::direct;
  const auto base = solve_scalar(c, m, opt);
  for (const auto& v : base.field) CHECK(std::abs(v[2]) < 1e-13);

  in.set(2, {0.5, 0.5});
  c.dirichlet["xmin"] = constant_data(in);
  const auto changed = solve_scalar(c, m, opt);
  for (int k = 0; k < m.n_nodes(); ++k) {
    CHECK(std::abs(changed.field[k][0] - base.field[k][0]) < 1e-12);
    CHECK(std::abs(changed.field[k][1] - base.field[k][1]) < 1e-12);
  }
}

TEST_CASE("Dirichlet values are imposed exactly and fields stay conjugate-symmetric") {
  const int nm = 3;
  const auto m = mesh::generate_rectangle({0.0, 0.0}, {1.0, 1.0}, {5, 5});
  std::mt19937 rng(7);
  ScalarCase c;
  c.kappa = 0.05;
  c.omega = 3.0;
  c.n_modes = nm;
  c.velocity = VelocityField::from_function(m, nm, [&](const Point& x, int i) {
    SpectralCoeffs u(nm);
    u.set(0, i == 0 ? 1.0 + 0.2 * x[1] : 0.5 + 0.2 * x[0]);
    u.set(1, {0.3, 0.1});
    return u;
  });
  const auto data = random_coeffs(rng, nm);
  c.dirichlet["xmin"] = [&](const Point& x) { return (1.0 + x[1]) * data; };
  const auto sol = solve_scalar(c, m);
  CHECK(sol.converged);
  for (int node : mesh::group_nodes(m, {"xmin"})) {
    const auto expect = (1.0 + m.coords[node][1]) * data;
    for (int n = 0; n < nm; ++n) CHECK(sol.field[node][n] == expect[n]);
  }
  CHECK(symmetry_defect(sol.field) == 0.0);
}

TEST_CASE("serial and parallel assembly agree bitwise") {
  const int nm = 2;
  const auto m = mesh::generate_box_tet({1.0, 1.0, 1.0}, {3, 3, 3});
  ScalarCase c;
  c.n_modes = nm;
  c.omega = 1.0;
  c.velocity = VelocityField::from_function(m, nm, [&](const Point& x, int i) {
    SpectralCoeffs u(nm);
    u.set(0, 0.5 + x[i]);
    u.set(1, {0.1 * i, 0.2});
    return u;
  });
  c.dirichlet["xmin"] = constant_data(steady(nm, 1.0));
  const auto s = assemble_scalar(c, m, Execution::serial).system;
  const auto p = assemble_scalar(c, m, Execution::parallel).system;
  for (std::size_t e = 0; e < s.blocks.size(); ++e) CHECK((s.blocks[e] - p.blocks[e]).norm() == 0.0);
}

TEST_CASE("backflow term adds the negative normal flux on inflow facets") {
  const auto m = mesh::generate_interval(1.0, 4);
  ScalarCase c;
  c.kappa = 0.1;
  c.velocity = uniform_1d(m, 1, -1.0);
  c.dirichlet["left"] = constant_data(steady(1, 0.0));
  const auto off = assemble_scalar(c, m).system.dense();
  c.backflow_beta = 1.0;
  const auto on = assemble_scalar(c, m).system.dense();
  CMatrix diff = on - off;
  CHECK(std::abs(diff(4, 4) - 0.5) < 1e-14);
  diff(4, 4) = 0.0;
  CHECK(diff.norm() == 0.0);
}

TEST_CASE("energy identity holds for divergence-free linear velocity") {
  const int nm = 3;
  auto check_mesh = [&](const mesh::Mesh& m, std::vector<std::string> inflow) {
    std::mt19937 rng(11);
    ScalarCase c;
    c.kappa = 0.03;
    c.omega = 2.5;
    c.n_modes = nm;
    c.velocity = VelocityField::from_function(m, nm, [&](const Point& x, int i) {
      SpectralCoeffs u(nm);
      const int j = (i + 1) % m.dim;
      u.set(0, 1.0 + 0.2 * x[j]);
      u.set(1, {0.2, 0.1});
      return u;
    });
    for (const auto& g : inflow) c.dirichlet[g] = constant_data(steady(nm, 0.0));
    SpectralField w(m.n_nodes());
    const auto fixed = mesh::group_nodes(m, inflow);
    for (int k = 0; k < m.n_nodes(); ++k) w[k] = random_coeffs(rng, nm);
    for (int k : fixed) w[k] = SpectralCoeffs(nm);
    const auto p = coercivity_probe(c, m, w);
    CHECK(p.boundary > 0.0);
    CHECK(p.least_squares > 0.0);
    CHECK(std::abs(p.re_b - p.total()) < 1e-10 * p.total());
    CHECK(p.re_b > 0.0);
  };
  check_mesh(mesh::generate_rectangle({0.0, 0.0}, {1.0, 1.0}, {5, 4}), {"xmin", "ymin"});
  check_mesh(mesh::generate_box_tet({1.0, 1.0, 1.0}, {3, 3, 3}), {"xmin", "ymin", "zmin"});
}

TEST_CASE("coercivity probe rejects inflow on natural boundaries and nonzero Dirichlet values") {
  const auto m = mesh::generate_interval(1.0, 4);
  ScalarCase c;
  c.velocity = uniform_1d(m, 1, 1.0);
  c.dirichlet["right"] = constant_data(steady(1, 0.0));
  SpectralField w(m.n_nodes(), steady(1, 1.0));
  w[4] = steady(1, 0.0);
  CHECK_THROWS_AS(coercivity_probe(c, m, w), InvalidInput);
  c.dirichlet.clear();
  c.dirichlet["left"] = constant_data(steady(1, 0.0));
  CHECK_THROWS_AS(coercivity_probe(c, m, w), InvalidInput);
}

TEST_CASE("case validation") {
  const auto m = mesh::generate_interval(1.0, 4);
  ScalarCase c;
  CHECK_THROWS_AS(assemble_scalar(c, m), InvalidInput);
  c.dirichlet["left"] = constant_data(steady(1, 0.0));
  c.kappa = 0.0;
  CHECK_THROWS_AS(assemble_scalar(c, m), InvalidInput);
  c.kappa = 0.1;
  c.dirichlet["nowhere"] = constant_data(steady(1, 0.0));
  CHECK_THROWS_AS(assemble_scalar(c, m), InvalidInput);
  c.dirichlet.erase("nowhere");
  c.dirichlet["left"] = constant_data(steady(2, 0.0));
  CHECK_THROWS_AS(assemble_scalar(c, m), InvalidInput);
}

TEST_CASE("time reconstruction evaluates the series") {
  SpectralCoeffs c(2);
  c.set(0, 1.0);
  c.set(1, {0.5, 0.0});
  const auto v = reconstruct_in_time({c}, 2.0, 0.3);
  CHECK(std::abs(v[0] - (1.0 + std::cos(0.6))) < 1e-14);
}
