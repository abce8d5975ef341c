#include "tsgls/spectral/tau.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "tsgls/spectral/hermitian.hpp"

namespace tsgls::spectral {

namespace {

void check_metric(const SpatialMatrix& g, std::size_t n_dirs) {
  if (g.rows() != g.cols() || static_cast<std::size_t>(g.rows()) != n_dirs) {
    throw InvalidInput("compute_tau: metric shape does not match direction count");
  }
  if ((g - g.transpose()).norm() > 1e-12 * g.norm()) {
    throw InvalidInput("compute_tau: metric is not symmetric");
  }
  Eigen::LLT<SpatialMatrix> llt(g);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("compute_tau: metric is not positive definite");
  }
}

}  // namespace

double metric_contraction(const SpatialMatrix& g) { return g.squaredNorm(); }

CMatrix convective_metric(std::span<const CMatrix> a, const SpatialMatrix& g) {
  const auto m = a.front().rows();
  CMatrix s = CMatrix::Zero(m, m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CMatrix b = CMatrix::Zero(m, m);
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double gij = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (gij != 0.0) b += gij * a[j];
    }
    s += a[i] * b;
  }
  return s;
}

TauMatrix compute_tau(std::span<const CMatrix> a, const SpatialMatrix& g,
                      double kappa, double c_i) {
  if (a.empty()) throw InvalidInput("compute_tau: no convection matrices");
  if (kappa < 0.0) throw InvalidInput("compute_tau: kappa must be >= 0");
  if (c_i <= 0.0) throw InvalidInput("compute_tau: C_I must be > 0");
  check_metric(g, a.size());

  const auto m = a.front().rows();
  CMatrix s = convective_metric(a, g);
  s.diagonal().array() += c_i * kappa * kappa * metric_contraction(g);

  const auto eig = hermitian_eig(0.5 * (s + s.adjoint()));
  const double lmin = eig.eigenvalues[0];
  const double lmax = eig.eigenvalues[m - 1];
  if (!(lmin > 1e-14 * std::max(lmax, 0.0))) {
    std::ostringstream msg;
    msg << "compute_tau: singular argument matrix (eigenvalue " << lmin
        << "); zero velocity requires kappa > 0";
    throw InvalidInput(msg.str());
  }

  TauMatrix out;
  out.n_modes = static_cast<int>((m + 1) / 2);
  out.tau = apply_spectral_function(eig, [](double l) { return 1.0 / std::sqrt(l); });
  out.sqrt_tau =
      apply_spectral_function(eig, [](double l) { return std::pow(l, -0.25); });
  return out;
}

TauMatrix compute_tau(std::span<const ConvolutionMatrix> a,
                      const SpatialMatrix& g, double kappa, double c_i) {
  std::vector<CMatrix> dense;
  dense.reserve(a.size());
  for (const auto& ai : a) dense.push_back(ai.dense());
  return compute_tau(dense, g, kappa, c_i);
}

double steady_tau(std::span<const double> u, const SpatialMatrix& g,
                  double kappa, double c_i) {
  double ugu = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      ugu += u[i] * g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * u[j];
    }
  }
  const double arg = ugu + c_i * kappa * kappa * metric_contraction(g);
  if (!(arg > 0.0)) throw InvalidInput("steady_tau: singular argument");
  return 1.0 / std::sqrt(arg);
}

}  // namespace tsgls::spectral
