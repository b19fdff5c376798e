#pragma once
// Independent transmon spectrum: periodic phase grid, sixth-order central
// differences for d^2/dphi^2. Only valid for n_g = 0.
#include <Eigen/Dense>

#include "asqchain/cqed_readout.hpp"

namespace asq::testing {

inline Eigen::VectorXd phase_grid_levels(double e_c, const ChainConfig& config, const SpinConfiguration& spins,
                                         int points = 2048) {
  const double h = kTwoPi / points;
  static constexpr double c[4] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(points, points);
  for (int k = 0; k < points; ++k) {
    const double phi = -kPi + h * k;
    H(k, k) = -4.0 * e_c * c[0] / (h * h) + josephson_potential(config, spins, phi);
    for (int d = 1; d <= 3; ++d) {
      const double v = -4.0 * e_c * c[d] / (h * h);
      H(k, (k + d) % points) += v;
      H(k, (k - d + points) % points) += v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double phase_grid_f01(double e_c, const ChainConfig& config, const SpinConfiguration& spins,
                             int points = 2048) {
  const auto ev = phase_grid_levels(e_c, config, spins, points);
  return ev(1) - ev(0);
}

}  // namespace asq::testing
