#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asqchain/spin_core.hpp"

namespace asq {

enum class CircuitKind { Transmon, Fluxonium };

std::string to_string(CircuitKind k);

// Readout circuit built around the coupling junction (E_J from the chain).
struct ReadoutCircuit {
  CircuitKind kind = CircuitKind::Transmon;
  double e_c = 1.0;        // GHz
  double e_l = 0.0;        // GHz, fluxonium only
  double loop_flux = 0.0;  // external phase of the fluxonium loop (radians)
  double n_g = 0.0;        // offset charge, transmon only
  int basis_size = 41;

  static ReadoutCircuit transmon(double e_c, double n_g = 0.0, int basis_size = 41);
  static ReadoutCircuit fluxonium(double e_c, double e_l, double loop_flux = 0.0, int basis_size = 120);
  void validate() const;
};

struct ResonatorSpec {
  double f_bare = 5.5;  // GHz
  double g = 0.0;       // GHz
  int levels = 8;       // photon truncation
  void validate() const;
};

struct SpinBranchSpectrum {
  SpinConfiguration spins;
  std::vector<double> levels;       // ascending (GHz)
  std::vector<double> transitions;  // f_{0->k}, k = 1.. (GHz)
  int basis_size = 0;               // basis actually used
};

// Classical potential of the coupling junction plus all ASQs (no Zeeman offset).
double josephson_potential(const ChainConfig& config, const SpinConfiguration& spins, double phi);

struct LevelOptions {
  bool check_convergence = true;
  double tolerance = 1e-6;  // GHz change of f01 on doubling the basis
  int max_levels = 12;      // how many levels to report
};

SpinBranchSpectrum transmon_levels(const ReadoutCircuit& circuit, const ChainConfig& config,
                                   const SpinConfiguration& spins, const LevelOptions& opt = {});
SpinBranchSpectrum fluxonium_levels(const ReadoutCircuit& circuit, const ChainConfig& config,
                                    const SpinConfiguration& spins, const LevelOptions& opt = {});
SpinBranchSpectrum circuit_levels(const ReadoutCircuit& circuit, const ChainConfig& config,
                                  const SpinConfiguration& spins, const LevelOptions& opt = {});

// Circuit Hamiltonian and the charge operator coupling to the resonator, in
// the circuit's own truncated basis.
struct CircuitMatrices {
  CMat h;
  CMat n;
};
CircuitMatrices circuit_matrices(const ReadoutCircuit& circuit, const ChainConfig& config,
                                 const SpinConfiguration& spins, int basis_size);

struct DressedOptions {
  int circuit_states = 8;  // K
  bool strict = true;      // throw when the resonator branch is ambiguous
};

struct DressedResult {
  double frequency = 0.0;      // dressed |0,1> - |0,0> (GHz)
  double overlap = 1.0;        // |<0,1 bare|branch>|^2
  double min_detuning = 0.0;   // min_k |f_bare - f_0k| (GHz)
  bool near_resonance = false; // min_detuning < 5 g
  double partner = 0.0;        // dressed level with most |0->2 circuit, 0 photon> weight (GHz above ground)
  std::vector<double> circuit_transitions;  // bare f_0k, k = 1..K-1
};

DressedResult dressed_resonator(const ReadoutCircuit& circuit, const ChainConfig& config,
                                const SpinConfiguration& spins, const ResonatorSpec& resonator,
                                const DressedOptions& opt = {});
double dressed_resonator_freq(const ReadoutCircuit& circuit, const ChainConfig& config,
                              const SpinConfiguration& spins, const ResonatorSpec& resonator,
                              const DressedOptions& opt = {});

struct ScanRow {
  double loop_flux = 0.0;   // Phi / Phi0
  std::string spin_config;  // e.g. "on_up"
  std::string branch;       // resonator | partner | circuit_01 | circuit_02
  double f_ghz = 0.0;
};

struct ScanSetpoint {
  double loop_flux = 0.0;  // Phi / Phi0
  double on_contrast = 0.0;
  double off_contrast = 0.0;
  double off_overlap = 0.0;  // min bare overlap of the OFF branches
  double on_overlap = 0.0;   // min bare overlap of the ON branches
};

struct AvoidedCrossing {
  double loop_flux = 0.0;  // where the bare 0->2 transition meets f_bare
  double min_gap = 0.0;    // smallest sampled resonator/partner splitting nearby (GHz)
};

struct AvoidedCrossingScan {
  std::vector<ScanRow> rows;
  std::vector<AvoidedCrossing> crossings;
  std::optional<ScanSetpoint> setpoint;
};

struct ScanOptions {
  double flux_start = 0.0;  // Phi / Phi0
  double flux_stop = 0.5;
  int points = 101;
  int target = 0;
  double min_overlap = 0.9;     // hybridisation bound on the OFF branches at the setpoint
  double on_min_overlap = 0.5;  // ON branches only need to stay unambiguous
  double root_tolerance = 1e-6;  // GHz, OFF contrast at the suggested setpoint
};

// Sweeps the fluxonium loop flux with the target qubit ON and OFF (all other
// qubits OFF) and both target spins.
AvoidedCrossingScan avoided_crossing_scan(const ReadoutCircuit& circuit, const ChainConfig& config,
                                          const ResonatorSpec& resonator, const ScanOptions& opt = {});

// f_r(up) - f_r(down) of one qubit with all other spins down.
double spin_contrast(const ReadoutCircuit& circuit, const ChainConfig& config, const ResonatorSpec& resonator,
                     int qubit, const DressedOptions& opt = {});

struct JointLadder {
  std::vector<double> frequencies;  // index = number of up spins, 0..N
  std::vector<double> spread;       // max deviation among sampled configurations
};

struct LadderOptions {
  double e_so_tolerance = 0.1;    // relative spread allowed between qubits
  double degeneracy_tol = 1e-6;   // GHz, enforced when all E_SO are identical
  double off_tolerance = 1e-9;    // |cos(theta - phi_E)| counted as OFF
};

JointLadder joint_readout_ladder(const ChainConfig& config, const ReadoutCircuit& circuit,
                                 const ResonatorSpec& resonator, const LadderOptions& opt = {});

}  // namespace asq
