#include "tsgls/spectral/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tsgls::spectral {

SpectralCoeffs::SpectralCoeffs(int n_modes) : n_modes_(n_modes) {
  if (n_modes < 1) {
    throw InvalidInput("SpectralCoeffs: n_modes must be >= 1, got " +
                       std::to_string(n_modes));
  }
  values_.assign(2 * n_modes - 1, cplx{0.0, 0.0});
}

SpectralCoeffs SpectralCoeffs::from_nonnegative(std::span<const cplx> modes) {
  SpectralCoeffs c(static_cast<int>(modes.size()));
  for (int n = 0; n < c.n_modes(); ++n) c.set(n, modes[n]);
  return c;
}

SpectralCoeffs SpectralCoeffs::from_full(std::span<const cplx> values,
                                         double tol) {
  if (values.size() % 2 == 0) {
    throw InvalidInput("SpectralCoeffs: full value array must have odd length");
  }
  const int n_modes = static_cast<int>(values.size() + 1) / 2;
  SpectralCoeffs c(n_modes);
  double scale = 0.0;
  for (auto v : values) scale = std::max(scale, std::abs(v));
  for (int n = 0; n < n_modes; ++n) {
    const cplx pos = values[c.index(n)];
    const cplx neg = values[c.index(-n)];
    if (std::abs(pos - std::conj(neg)) > tol * std::max(scale, 1e-300)) {
      throw InvalidInput("SpectralCoeffs: conjugate symmetry violated at mode " +
                         std::to_string(n));
    }
    c.set(n, pos);
  }
  return c;
}

void SpectralCoeffs::set(int n, cplx value) {
  if (n == 0) {
    values_[index(0)] = cplx{value.real(), 0.0};
    return;
  }
  values_[index(n)] = value;
  values_[index(-n)] = std::conj(value);
}

CVector SpectralCoeffs::to_vector() const {
  CVector v(size());
  for (int k = 0; k < size(); ++k) v[k] = values_[k];
  return v;
}

double SpectralCoeffs::max_abs() const {
  double m = 0.0;
  for (auto v : values_) m = std::max(m, std::abs(v));
  return m;
}

SpectralCoeffs& SpectralCoeffs::operator+=(const SpectralCoeffs& other) {
  if (other.n_modes_ != n_modes_) {
    throw InvalidInput("SpectralCoeffs: mode count mismatch");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

SpectralCoeffs& SpectralCoeffs::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

SpectralCoeffs operator+(SpectralCoeffs a, const SpectralCoeffs& b) {
  a += b;
  return a;
}

SpectralCoeffs operator*(double s, SpectralCoeffs a) {
  a *= s;
  return a;
}

SpectralCoeffs fourier_coefficients(std::span<const double> samples,
                                    int n_modes) {
  if (n_modes < 1) {
    throw InvalidInput("fourier_coefficients: n_modes must be >= 1");
  }
  const auto n_samples = static_cast<int>(samples.size());
  const int needed = 2 * (2 * n_modes - 1);
  if (n_samples < needed) {
    throw InvalidInput("fourier_coefficients: " + std::to_string(n_samples) +
                       " samples given, at least " + std::to_string(needed) +
                       " required for " + std::to_string(n_modes) + " modes");
  }
  SpectralCoeffs c(n_modes);
  for (int n = 0; n < n_modes; ++n) {
    cplx sum{0.0, 0.0};
    for (int s = 0; s < n_samples; ++s) {
      const double phase = -2.0 * std::numbers::pi * n * s / n_samples;
      sum += samples[s] * cplx{std::cos(phase), std::sin(phase)};
    }
    c.set(n, sum / static_cast<double>(n_samples));
  }
  return c;
}

cplx evaluate_complex(const SpectralCoeffs& coeffs, double omega, double t) {
  cplx sum{0.0, 0.0};
  for (int n = -coeffs.n_modes() + 1; n < coeffs.n_modes(); ++n) {
    const double phase = n * omega * t;
    sum += coeffs[n] * cplx{std::cos(phase), std::sin(phase)};
  }
  return sum;
}

double evaluate_in_time(const SpectralCoeffs& coeffs, double omega, double t) {
  return evaluate_complex(coeffs, omega, t).real();
}

double truncation_error(std::span<const double> samples, int n_modes) {
  const auto coeffs = fourier_coefficients(samples, n_modes);
  const auto n_samples = static_cast<double>(samples.size());
  double err2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(s) / n_samples;
    const double approx = evaluate_in_time(coeffs, 1.0, t);
    err2 += (samples[s] - approx) * (samples[s] - approx);
    ref2 += samples[s] * samples[s];
  }
  return ref2 > 0.0 ? std::sqrt(err2 / ref2) : std::sqrt(err2);
}

}  // namespace tsgls::spectral
