#pragma once

#include <random>

#include "tsgls/spectral/coeffs.hpp"
#include "tsgls/types.hpp"

namespace testing_support {

using tsgls::cplx;

inline cplx random_cplx(std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  const double re = u(rng);
  const double im = u(rng);
  return {re, im};
}

inline tsgls::spectral::SpectralCoeffs random_coeffs(std::mt19937& rng, int n_modes,
                                                     double scale = 1.0) {
  tsgls::spectral::SpectralCoeffs c(n_modes);
  for (int n = 0; n < n_modes; ++n) c.set(n, random_cplx(rng, scale));
  return c;
}

inline tsgls::CMatrix random_hermitian(std::mt19937& rng, int m) {
  tsgls::CMatrix a(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = random_cplx(rng);
  }
  return 0.5 * (a + a.adjoint());
}

}  // namespace testing_support
