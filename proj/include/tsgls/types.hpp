#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tsgls {

using cplx = std::complex<double>;

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
using RVector = Eigen::Matrix<double, Eigen::Dynamic, 1>;

/// Small dense matrix for spatial tensors (dim <= 3), stack allocated.
using SpatialMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

using Point = std::array<double, 3>;

/// Serial execution is bit-reproducible; parallel uses OpenMP where the
/// kernel supports it.
enum class Execution { serial, parallel };

/// Raised when an input violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values met inside a numerical kernel.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsgls
