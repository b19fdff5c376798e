#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace asq {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// SI constants (exact since 2019).
inline constexpr double kPlanck = 6.62607015e-34;         // J s
inline constexpr double kElectronCharge = 1.602176634e-19;  // C
inline constexpr double kFluxQuantum = kPlanck / (2.0 * kElectronCharge);

// Base of all library errors. Validation problems map to CLI exit code 2,
// numerical trouble to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// |Etilde| collapsed; the first-order coupling formula is meaningless there.
class DegenerateCouplingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Wrap into (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, kTwoPi);  // [-pi, pi]
  if (w <= -kPi) w += kTwoPi;
  return w;
}

// Wrap into [0, 1).
inline double wrap_flux(double f) {
  double w = f - std::floor(f);
  if (w >= 1.0) w = 0.0;
  return w;
}

// Shortest signed distance between two fluxes on the unit circle, in [-0.5, 0.5).
inline double flux_distance(double a, double b) {
  double d = std::remainder(a - b, 1.0);
  if (d >= 0.5) d -= 1.0;
  return d;
}

}  // namespace asq
