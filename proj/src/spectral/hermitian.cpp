#include "tsgls/spectral/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace tsgls::spectral {

CMatrix EigenDecomposition::reconstruct() const {
  return apply_spectral_function(*this, [](double l) { return l; });
}

namespace {

double off_diagonal_norm2(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      if (r != c) s += std::norm(a(r, c));
    }
  }
  return s;
}

// One unitary Jacobi rotation annihilating a(p, q). With a(p, q) =
// |a| exp(i phi) the rotation is W = D P D^H, P the real Jacobi rotation of
// the phase-aligned matrix and D = diag(.., exp(-i phi) at q, ..).
void rotate(CMatrix& a, CMatrix& v, Eigen::Index p, Eigen::Index q) {
  const cplx apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const cplx phase = apq / mag;  // exp(i phi)
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const cplx s_pos = s * phase;             // s exp(i phi)
  const cplx s_neg = s * std::conj(phase);  // s exp(-i phi)
  const Eigen::Index n = a.rows();

  for (Eigen::Index r = 0; r < n; ++r) {
    const cplx arp = a(r, p);
    const cplx arq = a(r, q);
    a(r, p) = c * arp - s_neg * arq;
    a(r, q) = s_pos * arp + c * arq;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const cplx apr = a(p, r);
    const cplx aqr = a(q, r);
    a(p, r) = c * apr - s_pos * aqr;
    a(q, r) = s_neg * apr + c * aqr;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const cplx vrp = v(r, p);
    const cplx vrq = v(r, q);
    v(r, p) = c * vrp - s_neg * vrq;
    v(r, q) = s_pos * vrp + c * vrq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

EigenDecomposition hermitian_eig(const CMatrix& h) {
  if (h.rows() != h.cols()) throw InvalidInput("hermitian_eig: matrix not square");
  const Eigen::Index n = h.rows();
  const double norm_h = h.norm();
  const double defect = (h - h.adjoint()).norm();
  if (defect > 1e-10 * norm_h) {
    std::ostringstream msg;
    msg << "hermitian_eig: matrix is not Hermitian (||H - H^H||_F = " << defect
        << ", ||H||_F = " << norm_h << ")";
    throw InvalidInput(msg.str());
  }

  CMatrix a = 0.5 * (h + h.adjoint());
  CMatrix v = CMatrix::Identity(n, n);
  const double target = std::pow(1e-17 * norm_h, 2);
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diagonal_norm2(a) <= target) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });
  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

CMatrix matrix_inv_sqrt(const CMatrix& h) {
  const auto eig = hermitian_eig(h);
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (!(eig.eigenvalues[k] > 0.0)) {
      std::ostringstream msg;
      msg << "matrix_inv_sqrt: matrix is not positive definite (eigenvalue "
          << eig.eigenvalues[k] << ")";
      throw InvalidInput(msg.str());
    }
  }
  return apply_spectral_function(eig,
                                 [](double l) { return 1.0 / std::sqrt(l); });
}

CMatrix matrix_negative_part(const CMatrix& h) {
  const auto eig = hermitian_eig(h);
  if (eig.eigenvalues.size() == 0 || eig.eigenvalues[0] >= 0.0) {
    return CMatrix::Zero(h.rows(), h.cols());
  }
  return apply_spectral_function(eig,
                                 [](double l) { return std::min(l, 0.0); });
}

}  // namespace tsgls::spectral
