#include "tsgls/linalg/gmres.hpp"

#include <cmath>
#include <sstream>

namespace tsgls::linalg {

namespace {

void check_finite(const RVector& v, const char* what, long matvecs) {
  if (!v.allFinite()) {
    std::ostringstream msg;
    msg << "gmres: non-finite values in " << what << " after " << matvecs
        << " matrix-vector products";
    throw NumericalError(msg.str());
  }
}

}  // namespace

GmresResult gmres(const LinearOperator& a, const RVector& b, const GmresConfig& config,
                  const LinearOperator& precond, const RVector* x0) {
  if (config.restart < 2) throw InvalidInput("gmres: restart must be >= 2");
  if (!(config.tol > 0.0)) throw InvalidInput("gmres: tolerance must be > 0");
  check_finite(b, "right-hand side", 0);

  const Eigen::Index n = b.size();
  GmresResult res;
  res.x = x0 ? *x0 : RVector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    res.history.push_back(0.0);
    return res;
  }
  const double target = config.tol * bnorm;
  const int m = static_cast<int>(std::min<Eigen::Index>(config.restart, std::max<Eigen::Index>(n, 1)));

  RMatrix v(n, m + 1);
  RMatrix z;  // preconditioned directions, kept for the update
  if (precond) z.resize(n, m);
  RMatrix h = RMatrix::Zero(m + 1, m);
  RVector cs(m), sn(m), g(m + 1);
  RVector w(n), tmp(n), r(n);

  auto residual = [&]() {
    a(res.x, tmp);
    ++res.matvecs;
    r = b - tmp;
    check_finite(r, "residual", res.matvecs);
    return r.norm();
  };

  double beta = residual();
  res.history.push_back(beta / bnorm);
  res.restart_residuals.push_back(beta / bnorm);
  while (beta > target && res.matvecs < config.max_matvecs) {
    v.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    h.setZero();
    int j = 0;
    for (; j < m && res.matvecs < config.max_matvecs; ++j) {
      if (precond) {
        precond(v.col(j), tmp);
        z.col(j) = tmp;
        a(tmp, w);
      } else {
        a(v.col(j), w);
      }
      ++res.matvecs;
      check_finite(w, "Krylov vector", res.matvecs);

      auto basis = v.leftCols(j + 1);
      RVector hc = basis.transpose() * w;
      w.noalias() -= basis * hc;
      RVector hc2 = basis.transpose() * w;
      w.noalias() -= basis * hc2;
      hc += hc2;
      const double wn = w.norm();
      h.col(j).head(j + 1) = hc;
      h(j + 1, j) = wn;

      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs[j] = denom == 0.0 ? 1.0 : h(j, j) / denom;
      sn[j] = denom == 0.0 ? 0.0 : h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (!std::isfinite(g[j + 1])) {
        throw NumericalError("gmres: non-finite residual estimate");
      }
      res.history.push_back(std::abs(g[j + 1]) / bnorm);

      const bool breakdown = wn <= 1e-14 * std::abs(h(j, j));
      if (!breakdown) v.col(j + 1) = w / wn;
      if (std::abs(g[j + 1]) <= target || breakdown) {
        ++j;
        break;
      }
    }
    // Solve the triangular least-squares problem and update x.
    if (j > 0) {
      RVector y = h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
      if (precond) {
        res.x.noalias() += z.leftCols(j) * y;
      } else {
        res.x.noalias() += v.leftCols(j) * y;
      }
    }
    const double prev = beta;
    beta = residual();
    res.history.push_back(beta / bnorm);
    res.restart_residuals.push_back(beta / bnorm);
    if (j == 0 || (beta >= prev && beta > target)) break;  // stagnation
  }
  res.relative_residual = beta / bnorm;
  res.converged = beta <= target;
  return res;
}

}  // namespace tsgls::linalg
