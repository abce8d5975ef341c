#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "tsgls/mesh/mesh.hpp"
#include "tsgls/verification/verification.hpp"

using namespace tsgls;
using namespace tsgls::verification;
using spectral::SpectralCoeffs;

namespace {

// Thomas algorithm for a constant-coefficient tridiagonal complex system
// lo x_{i-1} + di x_i + up x_{i+1} = r_i with x_0 = x_n = 0.
std::vector<cplx> solve_tridiagonal(cplx lo, cplx di, cplx up, const std::vector<cplx>& r) {
  const std::size_t n = r.size();
  std::vector<cplx> c(n), d(n), x(n);
  c[0] = up / di;
  d[0] = r[0] / di;
  for (std::size_t i = 1; i < n; ++i) {
    const cplx m = di - lo * c[i - 1];
    c[i] = up / m;
    d[i] = (r[i] - lo * d[i - 1]) / m;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace

TEST_CASE("steady 1D exact solution limits and boundary values") {
  const auto lin = exact_steady_advection_diffusion_1d(0.0, 0.1, 2.0, 3.0);
  CHECK(lin(1.0) == doctest::Approx(1.5).epsilon(1e-15));
  for (double u : {-50.0, -1.0, 1.0, 50.0, 1e4}) {
    const auto f = exact_steady_advection_diffusion_1d(u, 0.01, 1.0, 2.0);
    CHECK(f(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(f(1.0) - 2.0) < 1e-14);
    CHECK(std::isfinite(f(0.5)));
  }
  // Large Pe: boundary layer at the outlet, plateau at zero inside.
  CHECK(std::abs(exact_steady_advection_diffusion_1d(1e4, 1e-3, 1.0, 1.0)(0.9)) < 1e-300);
}

TEST_CASE("steady 1D exact solution matches a fine finite-difference solve at Pe = 10") {
  const double u = 10.0, kappa = 1.0, length = 1.0;
  const int n = 20000;
  const double h = length / n;
  // kappa phi'' - u phi' = 0 with central differences.
  const cplx lo = kappa / (h * h) + u / (2.0 * h);
  const cplx di = -2.0 * kappa / (h * h);
  const cplx up = kappa / (h * h) - u / (2.0 * h);
  std::vector<cplx> r(n - 1, 0.0);
  r.back() = -up * 1.0;
  const auto x = solve_tridiagonal(lo, di, up, r);
  const auto exact = exact_steady_advection_diffusion_1d(u, kappa, length, 1.0);
  CHECK(std::abs(x[n / 2 - 1].real() - exact(0.5)) < 1e-7);
}

TEST_CASE("oscillatory channel exact profile") {
  const double rho = 1.06, mu = 0.04, a = 0.5;
  SUBCASE("mode 0 is the Poiseuille parabola") {
    SpectralCoeffs g(1);
    g.set(0, -2.0);
    const auto u = oscillatory_channel_exact(g, rho, mu, 0.0, a);
    CHECK(u(0.0)[0].real() == doctest::Approx(2.0 / (2.0 * mu) * a * a).epsilon(1e-14));
    CHECK(std::abs(u(a)[0]) < 1e-15);
  }
  SUBCASE("low-frequency limit approaches the quasi-steady parabola") {
    SpectralCoeffs g(2);
    g.set(1, {1.0, 0.5});
    const auto u = oscillatory_channel_exact(g, rho, mu, 1e-6, a);
    for (double y : {0.0, 0.2, 0.4}) {
      const cplx qs = -g[1] / (2.0 * mu) * (a * a - y * y);
      CHECK(std::abs(u(y)[1] - qs) < 1e-5 * std::abs(qs));
    }
  }
  SUBCASE("W = 10 matches a finite-difference solve of the mode equation") {
    const double omega = std::pow(10.0 / a, 2) * mu / rho;
    CHECK(womersley_number(a, omega, rho, mu) == doctest::Approx(10.0));
    SpectralCoeffs g(3);
    g.set(1, {0.3, -0.2});
    g.set(2, {-0.1, 0.05});
    const auto u = oscillatory_channel_exact(g, rho, mu, omega, a);
    const int n = 20000;
    const double h = 2.0 * a / n;
    for (int mode = 1; mode <= 2; ++mode) {
      // mu u'' - i rho n omega u = G_n.
      const cplx lo = mu / (h * h);
      const cplx di = -2.0 * mu / (h * h) - cplx{0.0, rho * mode * omega};
      std::vector<cplx> r(n - 1, g[mode]);
      const auto x = solve_tridiagonal(lo, di, lo, r);
      double err = 0.0, ref = 0.0;
      for (int i = 0; i < n - 1; i += 97) {
        const double y = -a + (i + 1) * h;
        err = std::max(err, std::abs(x[i] - u(y)[mode]));
        ref = std::max(ref, std::abs(u(y)[mode]));
      }
      CHECK(err < 1e-6 * ref);
    }
    // Conjugate symmetry of the returned modes.
    CHECK(u(0.1)[-1] == std::conj(u(0.1)[1]));
  }
}

TEST_CASE("L2 error of an inserted exact field vanishes") {
  const auto m = mesh::generate_rectangle({0.0, 0.0}, {1.0, 2.0}, {4, 5});
  SpatialSpectral ex = [](const Point& x) {
    SpectralCoeffs c(2);
    c.set(0, 1.0 + 2.0 * x[0] - x[1]);
    c.set(1, {x[1], 0.5 * x[0]});
    return c;
  };
  const auto f = sample_field(m, ex);
  CHECK(l2_error(f, ex, m) < 1e-14);
  // Norm of the constant 1 over area 2 is sqrt(2).
  SpatialSpectral one = [](const Point&) {
    SpectralCoeffs c(1);
    c.set(0, 1.0);
    return c;
  };
  CHECK(l2_norm(one, 1, m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const auto per_mode = l2_error_modes(f, ex, m);
  CHECK(per_mode.error.size() == 2);
  CHECK(per_mode.relative(1) < 1e-14);
}

TEST_CASE("observed order from a log-ratio slope") {
  const auto r = make_error_report({0.4, 0.2, 0.1}, {0.8, 0.4, 0.2});
  CHECK(r.observed_order.size() == 2);
  CHECK(r.observed_order[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(observed_order({1.0}, {0.1}), InvalidInput);
  CHECK_THROWS_AS(observed_order({1.0, 0.5}, {0.1, 0.2}), InvalidInput);
}

TEST_CASE("diagnostic numbers") {
  const auto m = mesh::generate_interval(1.0, 10);
  scalar::ScalarCase c;
  c.kappa = 0.02;
  c.dirichlet["left"] = [](const Point&) { return SpectralCoeffs(1); };
  auto d = diagnostics(c, m);
  CHECK(d.alpha == 0.0);
  CHECK(d.beta == 0.0);

  const double u = 1.7;
  c.velocity = VelocityField::from_function(m, 1, [&](const Point&, int) {
    SpectralCoeffs s(1);
    s.set(0, -u);
    return s;
  });
  d = diagnostics(c, m);
  CHECK(d.alpha == doctest::Approx(2.0 * u * 0.1 / (12.0 * c.kappa)).epsilon(1e-12));
  CHECK(d.alpha_e_min == doctest::Approx(d.alpha).epsilon(1e-12));

  c.n_modes = 3;
  c.omega = 4.0;
  c.velocity = VelocityField::zero(m.n_nodes(), 1, 3);
  d = diagnostics(c, m);
  CHECK(d.beta == doctest::Approx(0.1 * std::sqrt(2.0 * 4.0 / 0.02)).epsilon(1e-12));
}

TEST_CASE("1D manufactured diffusion converges at second order") {
  // -kappa phi'' + i omega phi = f with phi = sin(pi x) per mode.
  std::vector<double> hs, errs;
  for (int n : {8, 16, 32}) {
    const auto m = mesh::generate_interval(1.0, n);
    scalar::ScalarCase c;
    c.kappa = 0.5;
    c.omega = 1.0;
    c.n_modes = 2;
    c.dirichlet["left"] = [](const Point&) { return SpectralCoeffs(2); };
    c.dirichlet["right"] = c.dirichlet["left"];
    SpatialSpectral ex = [](const Point& x) {
      SpectralCoeffs s(2);
      s.set(0, std::sin(M_PI * x[0]));
      s.set(1, {0.5 * std::sin(M_PI * x[0]), 0.0});
      return s;
    };
    c.source = [&](const Point& x) {
      SpectralCoeffs s(2);
      const double v = std::sin(M_PI * x[0]);
      s.set(0, c.kappa * M_PI * M_PI * v);
      s.set(1, 0.5 * v * cplx{c.kappa * M_PI * M_PI, c.omega});
      return s;
    };
    scalar::ScalarSolveOptions opt;
    opt.solver = scalar::LinearSolverKind::direct;
    const auto sol = scalar::solve_scalar(c, m, opt);
    hs.push_back(1.0 / n);
    errs.push_back(l2_error(sol.field, ex, m));
  }
  const auto orders = observed_order(errs, hs);
  CHECK(orders.back() > 1.9);
}

TEST_CASE("manufactured source matches a finite-difference operator") {
  // Omega phi + conv(u, grad phi) - kappa lap phi, with derivatives of the
  // exact field taken by central differences and the convolution written
  // out as a double loop.
  const int n_modes = 3;
  const double kappa = 0.07, omega = 1.7;
  std::vector<SpectralCoeffs> vel(2, SpectralCoeffs(n_modes));
  vel[0].set(0, 0.8);
  vel[0].set(1, {0.2, -0.1});
  vel[1].set(0, -0.3);
  vel[1].set(2, {0.05, 0.15});
  SpectralCoeffs amp(n_modes);
  amp.set(0, 1.0);
  amp.set(1, {0.4, 0.3});
  amp.set(2, {-0.2, 0.1});
  const auto ms = manufactured_sine(2, vel, kappa, omega, amp);
  const double h = 1e-4;
  for (const Point x : {Point{0.13, 0.71, 0.0}, Point{0.52, 0.05, 0.0}}) {
    const auto f = ms.source(x);
    for (int m = -n_modes + 1; m < n_modes; ++m) {
      cplx expect = cplx(0.0, m * omega) * ms.exact(x)[m];
      for (int i = 0; i < 2; ++i) {
        Point xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const cplx lap = (ms.exact(xp)[m] - 2.0 * ms.exact(x)[m] + ms.exact(xm)[m]) / (h * h);
        expect -= kappa * lap;
        for (int n = -n_modes + 1; n < n_modes; ++n) {
          if (std::abs(m - n) >= n_modes) continue;
          expect += vel[i][m - n] * (ms.exact(xp)[n] - ms.exact(xm)[n]) / (2.0 * h);
        }
      }
      CHECK(std::abs(f[m] - expect) < 1e-5);
    }
  }
  // Conjugate symmetry of both fields.
  const auto e = ms.exact({0.3, 0.4, 0.0});
  CHECK(std::abs(e[-1] - std::conj(e[1])) == 0.0);
}
