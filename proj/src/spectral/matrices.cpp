#include "tsgls/spectral/matrices.hpp"

namespace tsgls::spectral {

CMatrix ConvolutionMatrix::dense() const {
  const int m = size();
  CMatrix a = CMatrix::Zero(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) a(r, c) = entry(r, c);
  }
  return a;
}

ConvolutionMatrix build_convolution(const SpectralCoeffs& u_modes) {
  return ConvolutionMatrix(u_modes);
}

OmegaMatrix::OmegaMatrix(int n_modes, double omega)
    : n_modes_(n_modes), omega_(omega) {
  if (n_modes < 1) throw InvalidInput("OmegaMatrix: n_modes must be >= 1");
  if (omega < 0.0) throw InvalidInput("OmegaMatrix: omega must be >= 0");
}

CMatrix OmegaMatrix::dense() const {
  CMatrix o = CMatrix::Zero(size(), size());
  for (int k = 0; k < size(); ++k) o(k, k) = diagonal(k);
  return o;
}

OmegaMatrix build_omega(int n_modes, double omega) {
  return OmegaMatrix(n_modes, omega);
}

}  // namespace tsgls::spectral
