#pragma once

#include "tsgls/types.hpp"

namespace tsgls::spectral {

/// H = V diag(eigenvalues) V^H with V unitary, eigenvalues ascending.
struct EigenDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;

  CMatrix reconstruct() const;
};

/// Dense Hermitian eigensolver (cyclic complex Jacobi rotations).
/// Rejects input with ||H - H^H||_F > 1e-10 ||H||_F.
EigenDecomposition hermitian_eig(const CMatrix& h);

/// Apply f to the eigenvalues: V diag(f(lambda)) V^H.
template <class F>
CMatrix apply_spectral_function(const EigenDecomposition& eig, F&& f) {
  const auto& v = eig.eigenvectors;
  CMatrix scaled = v;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    scaled.col(k) *= f(eig.eigenvalues[k]);
  }
  return scaled * v.adjoint();
}

/// H^{-1/2} for Hermitian positive definite H. Throws with the offending
/// eigenvalue when one is <= 0.
CMatrix matrix_inv_sqrt(const CMatrix& h);

/// Negative part (H - |H|)/2: same eigenvectors, eigenvalues min(lambda, 0).
/// Clipping is exact: a matrix with no negative eigenvalue maps to zero.
CMatrix matrix_negative_part(const CMatrix& h);

}  // namespace tsgls::spectral
