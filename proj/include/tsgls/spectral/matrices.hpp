#pragma once

#include <vector>

#include "tsgls/spectral/coeffs.hpp"
#include "tsgls/types.hpp"

namespace tsgls::spectral {

/// Band-restricted Hermitian Toeplitz matrix representing multiplication by
/// a spectral velocity: A(m, n) = u_{m-n} when |m-n| < N, zero otherwise.
/// Only the 2N-1 defining entries are stored.
class ConvolutionMatrix {
 public:
  explicit ConvolutionMatrix(SpectralCoeffs u_modes)
      : modes_(std::move(u_modes)) {}

  int n_modes() const { return modes_.n_modes(); }
  int size() const { return modes_.size(); }
  const SpectralCoeffs& modes() const { return modes_; }

  /// Entry at storage indices (row, col), 0-based over modes -N+1 .. N-1.
  cplx entry(int row, int col) const {
    const int diff = row - col;
    return (diff > -n_modes() && diff < n_modes()) ? modes_[diff] : cplx{};
  }

  CMatrix dense() const;

 private:
  SpectralCoeffs modes_;
};

ConvolutionMatrix build_convolution(const SpectralCoeffs& u_modes);

/// Diagonal time-derivative matrix Omega(m, m) = i m omega.
class OmegaMatrix {
 public:
  OmegaMatrix(int n_modes, double omega);

  int n_modes() const { return n_modes_; }
  int size() const { return 2 * n_modes_ - 1; }
  double omega() const { return omega_; }

  /// Diagonal entry at storage index k (mode k - N + 1).
  cplx diagonal(int k) const { return {0.0, (k - n_modes_ + 1) * omega_}; }

  CMatrix dense() const;

 private:
  int n_modes_;
  double omega_;
};

OmegaMatrix build_omega(int n_modes, double omega);

}  // namespace tsgls::spectral
