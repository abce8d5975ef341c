#pragma once

#include <span>
#include <vector>

#include "tsgls/types.hpp"

namespace tsgls::spectral {

/// Truncated Fourier series of a real periodic quantity.
///
/// Holds 2N-1 complex values for modes n = -N+1 .. N-1. Conjugate symmetry
/// (values[-n] == conj(values[n]), Im values[0] == 0) is an invariant: every
/// mutator writes both halves.
class SpectralCoeffs {
 public:
  explicit SpectralCoeffs(int n_modes = 1);

  /// Build from the independent modes n = 0 .. N-1. The imaginary part of
  /// mode 0 is discarded.
  static SpectralCoeffs from_nonnegative(std::span<const cplx> modes);

  /// Build from all 2N-1 values (index order -N+1 .. N-1). Rejects input
  /// whose conjugate-symmetry defect exceeds tol * max|value|.
  static SpectralCoeffs from_full(std::span<const cplx> values,
                                  double tol = 1e-12);

  int n_modes() const { return n_modes_; }
  int size() const { return 2 * n_modes_ - 1; }

  /// Mode n, |n| < N.
  cplx operator[](int n) const { return values_[index(n)]; }

  /// Set mode n and its mirror -n.
  void set(int n, cplx value);

  std::span<const cplx> values() const { return values_; }
  CVector to_vector() const;

  /// Largest |value|.
  double max_abs() const;

  /// Storage index of mode n.
  int index(int n) const { return n + n_modes_ - 1; }

  SpectralCoeffs& operator+=(const SpectralCoeffs& other);
  SpectralCoeffs& operator*=(double s);

 private:
  int n_modes_;
  std::vector<cplx> values_;
};

SpectralCoeffs operator+(SpectralCoeffs a, const SpectralCoeffs& b);
SpectralCoeffs operator*(double s, SpectralCoeffs a);

/// Discrete Fourier coefficients of uniformly spaced samples covering one
/// period without the repeated endpoint:
///   values[n] = (1/S) sum_s f(t_s) exp(-i n 2 pi s / S).
/// Requires S >= 2(2N-1) and N >= 1.
SpectralCoeffs fourier_coefficients(std::span<const double> samples,
                                    int n_modes);

/// Full complex sum sum_n values[n] exp(i n omega t).
cplx evaluate_complex(const SpectralCoeffs& coeffs, double omega, double t);

/// Real value of the series at time t.
double evaluate_in_time(const SpectralCoeffs& coeffs, double omega, double t);

/// Relative L2 error over the samples between a sampled signal and its
/// N-mode reconstruction. Used to report boundary-data truncation.
double truncation_error(std::span<const double> samples, int n_modes);

}  // namespace tsgls::spectral
