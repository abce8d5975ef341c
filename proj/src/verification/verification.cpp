#include "tsgls/verification/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsgls/assembly.hpp"
#include "tsgls/mesh/quadrature.hpp"
#include "tsgls/mesh/shape.hpp"
#include "tsgls/spectral/hermitian.hpp"
#include "tsgls/spectral/tau.hpp"

namespace tsgls::verification {

using spectral::SpectralCoeffs;

std::function<double(double)> exact_steady_advection_diffusion_1d(double u, double kappa,
                                                                  double length, double g) {
  if (!(kappa > 0.0)) throw InvalidInput("exact solution: kappa must be > 0");
  if (!(length > 0.0)) throw InvalidInput("exact solution: length must be > 0");
  const double pe = u * length / kappa;
  if (pe == 0.0) return [=](double x) { return g * x / length; };
  if (pe < 0.0) {
    return [=](double x) { return g * std::expm1(u * x / kappa) / std::expm1(pe); };
  }
  // Divide through by exp(pe): both exponents are <= 0.
  return [=](double x) {
    return g * (std::exp(u * (x - length) / kappa) - std::exp(-pe)) / -std::expm1(-pe);
  };
}

namespace {

// cosh(k y) / cosh(k a) for Re k > 0 and |y| <= a without overflow.
cplx cosh_ratio(cplx k, double y, double a) {
  const double ay = std::abs(y);
  return std::exp(k * (ay - a)) * (1.0 + std::exp(-2.0 * k * ay)) / (1.0 + std::exp(-2.0 * k * a));
}

}  // namespace

std::function<SpectralCoeffs(double)> oscillatory_channel_exact(const SpectralCoeffs& gradient,
                                                                double rho, double mu,
                                                                double omega, double half_width) {
  if (!(mu > 0.0) || !(rho > 0.0)) throw InvalidInput("channel exact: rho and mu must be > 0");
  if (!(half_width > 0.0)) throw InvalidInput("channel exact: half width must be > 0");
  if (omega <= 0.0 && gradient.n_modes() > 1) {
    for (int n = 1; n < gradient.n_modes(); ++n) {
      if (gradient[n] != cplx{}) throw InvalidInput("channel exact: unsteady modes need omega > 0");
    }
  }
  return [=](double y) {
    SpectralCoeffs u(gradient.n_modes());
    u.set(0, -gradient[0].real() / (2.0 * mu) * (half_width * half_width - y * y));
    for (int n = 1; n < gradient.n_modes(); ++n) {
      if (gradient[n] == cplx{}) continue;
      const cplx iw{0.0, rho * n * omega};
      const cplx k = std::sqrt(iw / mu);
      u.set(n, -gradient[n] / iw * (1.0 - cosh_ratio(k, y, half_width)));
    }
    return u;
  };
}

double womersley_number(double half_width, double omega, double rho, double mu) {
  return half_width * std::sqrt(omega * rho / mu);
}

namespace {

// Accumulates |difference|^2 per stored mode index.
std::vector<double> mode_integrals(const SpectralField* field, const SpatialSpectral* exact,
                                   int n_modes, const mesh::Mesh& mesh) {
  const int m = 2 * n_modes - 1;
  std::vector<double> out(m, 0.0);
  const auto& rule = mesh::error_rule(mesh.type());
  const int nv = mesh.nodes_per_element();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    for (const auto& q : mesh::shape_eval(mesh, e, rule)) {
      SpectralCoeffs d(n_modes);
      if (field) d = interpolate_field(*field, conn, nv, q.values);
      if (exact) {
        const auto ex = (*exact)(q.x);
        if (ex.n_modes() != n_modes) throw InvalidInput("l2 error: mode count mismatch");
        d += -1.0 * ex;
      }
      for (int k = 0; k < m; ++k) out[k] += q.weight * std::norm(d.values()[k]);
    }
  }
  return out;
}

int field_modes(const SpectralField& f, const mesh::Mesh& mesh) {
  if (static_cast<int>(f.size()) != mesh.n_nodes()) {
    throw InvalidInput("l2 error: field size does not match mesh");
  }
  return f.empty() ? 1 : f.front().n_modes();
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return std::sqrt(s);
}

}  // namespace

double l2_error(const SpectralField& field, const SpatialSpectral& exact, const mesh::Mesh& mesh) {
  return total(mode_integrals(&field, &exact, field_modes(field, mesh), mesh));
}

double l2_norm(const SpatialSpectral& exact, int n_modes, const mesh::Mesh& mesh) {
  return total(mode_integrals(nullptr, &exact, n_modes, mesh));
}

double l2_norm(const SpectralField& field, const mesh::Mesh& mesh) {
  return total(mode_integrals(&field, nullptr, field_modes(field, mesh), mesh));
}

double ModeErrors::relative(int mode) const {
  return norm[mode] > 0.0 ? error[mode] / norm[mode] : error[mode];
}

ModeErrors l2_error_modes(const SpectralField& field, const SpatialSpectral& exact,
                          const mesh::Mesh& mesh) {
  const int nm = field_modes(field, mesh);
  const auto err = mode_integrals(&field, &exact, nm, mesh);
  const auto ref = mode_integrals(nullptr, &exact, nm, mesh);
  ModeErrors out;
  for (int n = 0; n < nm; ++n) {
    out.error.push_back(std::sqrt(err[n + nm - 1]));
    out.norm.push_back(std::sqrt(ref[n + nm - 1]));
  }
  return out;
}

std::vector<double> observed_order(const std::vector<double>& errors,
                                   const std::vector<double>& hs) {
  if (errors.size() != hs.size()) throw InvalidInput("observed order: size mismatch");
  if (hs.size() < 2) throw InvalidInput("observed order: at least two levels required");
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
    if (!(hs[k + 1] < hs[k])) throw InvalidInput("observed order: h must strictly decrease");
    out.push_back(std::log(errors[k] / errors[k + 1]) / std::log(hs[k] / hs[k + 1]));
  }
  return out;
}

ErrorReport make_error_report(std::vector<double> hs, std::vector<double> errors) {
  ErrorReport r;
  r.observed_order = observed_order(errors, hs);
  r.h = std::move(hs);
  r.l2_error = std::move(errors);
  return r;
}

double element_peclet(std::span<const CMatrix> a, const SpatialMatrix& g, double kappa,
                      double c_i) {
  const CMatrix am = spectral::convective_metric(a, g);
  const double lmax = spectral::hermitian_eig(am).eigenvalues.maxCoeff();
  const double diff = c_i * kappa * kappa * spectral::metric_contraction(g);
  return std::sqrt(std::max(lmax, 0.0) / diff);
}

DiagnosticNumbers diagnostics(const VelocityField& velocity, double kappa, double omega,
                              int n_modes, double c_i, const mesh::Mesh& mesh) {
  if (!(kappa > 0.0)) throw InvalidInput("diagnostics: kappa must be > 0");
  DiagnosticNumbers out;
  out.alpha_e_min = std::numeric_limits<double>::infinity();
  const auto& rule = mesh::assembly_rule(mesh.type());
  const int nv = mesh.nodes_per_element();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double elem_max = 0.0;
    for (const auto& q : mesh::shape_eval(mesh, e, rule)) {
      const auto a = convolution_at(velocity, mesh.elements[e], nv, q.values);
      elem_max = std::max(elem_max, element_peclet(a, q.metric, kappa, c_i));
    }
    out.alpha = std::max(out.alpha, elem_max);
    out.alpha_e_min = std::min(out.alpha_e_min, elem_max);
  }
  if (mesh.n_elements() == 0) out.alpha_e_min = 0.0;
  out.beta = mesh::max_element_size(mesh) * std::sqrt((n_modes - 1) * omega / kappa);
  return out;
}

DiagnosticNumbers diagnostics(const scalar::ScalarCase& c, const mesh::Mesh& mesh) {
  const auto vel = c.velocity.values.empty()
                       ? VelocityField::zero(mesh.n_nodes(), mesh.dim, c.n_modes)
                       : c.velocity;
  const double c_i = c.c_i > 0.0 ? c.c_i : mesh::default_c_i(mesh.type());
  return diagnostics(vel, c.kappa, c.omega, c.n_modes, c_i, mesh);
}

Manufactured manufactured_sine(int dim, const std::vector<spectral::SpectralCoeffs>& velocity,
                               double kappa, double omega,
                               const spectral::SpectralCoeffs& amplitudes, double wavenumber,
                               double shift) {
  if (dim < 1 || dim > 3) throw InvalidInput("manufactured_sine: dim must be 1, 2 or 3");
  if (static_cast<int>(velocity.size()) != dim) {
    throw InvalidInput("manufactured_sine: one velocity entry per direction required");
  }
  const int n_modes = amplitudes.n_modes();
  for (const auto& v : velocity) {
    if (v.n_modes() != n_modes) throw InvalidInput("manufactured_sine: mode count mismatch");
  }
  const double k = wavenumber;
  // Spatial factor of mode n and its gradient.
  auto factor = [=](const Point& x, int n, std::array<double, 3>* grad) {
    double s = 1.0;
    std::array<double, 3> sn{}, cs{};
    for (int i = 0; i < dim; ++i) {
      sn[i] = std::sin(k * x[i] + std::abs(n) * shift);
      cs[i] = std::cos(k * x[i] + std::abs(n) * shift);
      s *= sn[i];
    }
    if (grad) {
      for (int i = 0; i < dim; ++i) {
        double g = k * cs[i];
        for (int j = 0; j < dim; ++j) {
          if (j != i) g *= sn[j];
        }
        (*grad)[i] = g;
      }
    }
    return s;
  };
  Manufactured m;
  m.exact = [=](const Point& x) {
    spectral::SpectralCoeffs c(n_modes);
    for (int n = 0; n < n_modes; ++n) c.set(n, amplitudes[n] * factor(x, n, nullptr));
    return c;
  };
  m.source = [=](const Point& x) {
    const int size = 2 * n_modes - 1;
    std::vector<cplx> phi(size);
    std::vector<std::array<cplx, 3>> dphi(size);
    for (int n = -n_modes + 1; n < n_modes; ++n) {
      std::array<double, 3> g{};
      const double s = factor(x, n, &g);
      phi[n + n_modes - 1] = amplitudes[n] * s;
      for (int i = 0; i < dim; ++i) dphi[n + n_modes - 1][i] = amplitudes[n] * g[i];
    }
    std::vector<cplx> f(size);
    for (int mm = -n_modes + 1; mm < n_modes; ++mm) {
      cplx v = cplx(0.0, mm * omega) * phi[mm + n_modes - 1] +
               kappa * dim * k * k * phi[mm + n_modes - 1];
      for (int n = -n_modes + 1; n < n_modes; ++n) {
        const int d = mm - n;
        if (d <= -n_modes || d >= n_modes) continue;
        for (int i = 0; i < dim; ++i) v += velocity[i][d] * dphi[n + n_modes - 1][i];
      }
      f[mm + n_modes - 1] = v;
    }
    return spectral::SpectralCoeffs::from_full(f);
  };
  return m;
}

}  // namespace tsgls::verification
