#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tsgls/types.hpp"

namespace tsgls::linalg {

struct GmresConfig {
  int restart = 100;
  double tol = 0.05;
  long max_matvecs = 10000;
};

struct GmresResult {
  RVector x;
  bool converged = false;
  long matvecs = 0;
  /// Final true residual relative to ||b||.
  double relative_residual = 0.0;
  /// Relative residual after every iteration; restart entries hold the
  /// recomputed true residual.
  std::vector<double> history;
  /// True relative residual at the start of each cycle and at exit.
  std::vector<double> restart_residuals;
};

/// y = A x.
using LinearOperator = std::function<void(const RVector&, RVector&)>;

/// Restarted GMRES with right preconditioning (x = M^{-1} z), Givens
/// rotations and classical Gram-Schmidt with one reorthogonalization pass.
/// Returns unconverged results flagged rather than throwing; throws
/// NumericalError when a non-finite value appears.
GmresResult gmres(const LinearOperator& a, const RVector& b, const GmresConfig& config,
                  const LinearOperator& precond = nullptr, const RVector* x0 = nullptr);

}  // namespace tsgls::linalg
