#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "asqchain/report.hpp"
#include "asqchain/spin_core.hpp"

namespace asq {

struct EffectiveEj {
  double magnitude = 0.0;     // |Etilde| (GHz)
  double phase_offset = 0.0;  // arg(Etilde), (-pi, pi]
  cplx value() const { return std::polar(magnitude, phase_offset); }
};

// Complex total Josephson energy of the parallel network, defined so that the
// classical potential reads U(phi) = E_J - Re[Etilde e^{i phi}]:
//   Etilde = E_J - sum_l E_J,l e^{i theta_l}  [- sum_l s_l E_SO,l e^{i(pi/2 + theta_l)}].
// Throws DegenerateCouplingError when |Etilde| < 1e-6 E_J.
EffectiveEj effective_total_ej(const ChainConfig& config,
                               const std::optional<SpinConfiguration>& spins = std::nullopt);

// First-order longitudinal coupling J_ij (GHz), indices 0-based.
double pairwise_coupling(const ChainConfig& config, int i, int j);

CouplingReport coupling_report(const ChainConfig& config, bool include_triples = false);

// Minimum over phi of the classical potential for a fixed spin configuration.
// Independent of the closed forms above: grid bracketing + bisection on dU/dphi.
double classical_energy_oracle(const ChainConfig& config, const SpinConfiguration& spins);

// All 2^N oracle energies in basis-index order (qubit 0 most significant).
std::vector<double> classical_energy_table(const ChainConfig& config);

struct WalshDecomposition {
  double c0 = 0.0;
  std::vector<double> coefficients;  // by subset mask in basis-bit order
  CouplingReport report;             // orders 1..3 mapped onto E_i, J_ij, J_ijk
};

// Exact expansion of a diagonal energy table in products of s_i.
WalshDecomposition extract_couplings_walsh(std::span<const double> table);
WalshDecomposition extract_couplings_walsh(const std::map<SpinConfiguration, double>& table);

}  // namespace asq
