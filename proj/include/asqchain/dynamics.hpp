#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asqchain/report.hpp"
#include "asqchain/spin_core.hpp"

namespace asq {

inline constexpr int kDynamicsQubitCap = 14;

struct PulseSegment {
  std::vector<double> fluxes;  // Phi_i / Phi0
  double duration = 0.0;       // ns
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;
};

// Exact propagator exp(-2 pi i H t), H in GHz, t in ns.
CMat propagator(const SpinOperatorMatrix& h, double t_ns);
CVec evolve(const SpinOperatorMatrix& h, double t_ns, const CVec& state);

struct EvolveOptions {
  bool include_triples = true;
  int max_qubits = kDynamicsQubitCap;
};

// Piecewise-constant evolution: each segment rebuilds the coupling report at
// its fluxes and applies the exact propagator.
CVec evolve(const ChainConfig& config, const PulseSchedule& schedule, const CVec& initial,
            const EvolveOptions& opt = {});

CVec basis_state(const SpinConfiguration& spins);

struct GateResult {
  CMat unitary;            // full 2^N propagator (empty above full_unitary_max qubits)
  CMat pair_block;         // 4x4 after local-Z correction, spectators projected out
  double conditional_phase = 0.0;  // radians, (-pi, pi]
  double avg_fidelity = 0.0;
  double gate_time = 0.0;  // ns
};

struct CphaseOptions {
  std::optional<SpinConfiguration> spectators;  // full-length spins; pair entries ignored; default all up
  int max_qubits = kDynamicsQubitCap;
  int full_unitary_max = 10;
};

// Evolves for t = 1/(4|J|) under the given Hamiltonian and compares the pair
// block to diag(1, 1, 1, -1) after optimal single-qubit Z phases.
GateResult cphase_gate(const SpinModel& model, int a, int b, double j_pair, const CphaseOptions& opt = {});
GateResult cphase_gate(const ChainConfig& config, std::pair<int, int> pair, const CouplingReport& report,
                       const CphaseOptions& opt = {});

// Average gate fidelity of a (possibly non-unitary) 4x4 block against CPHASE.
double cphase_fidelity(const CMat& block);

enum class SpectatorVariant { ThreeBodyOnly, WithResidual };
std::string to_string(SpectatorVariant v);
SpectatorVariant spectator_variant_from_string(const std::string& s);

double spectator_coefficient(SpectatorVariant v);
double spectator_infidelity(int n, double epsilon, SpectatorVariant v);
long long max_qubits(double target_fidelity, double epsilon, SpectatorVariant v);

// Pair (0, 1) with coupling J plus, for every spectator k, the term
// epsilon*J Z0 Z1 Zk (and 1/2 epsilon*J Z0 Zk + 1/2 epsilon*J Z1 Zk with residuals).
SpinModel spectator_model(int n, double epsilon, SpectatorVariant v, double j_pair = 0.01);
double simulate_spectator_infidelity(int n, double epsilon, SpectatorVariant v, double j_pair = 0.01);

// J^zz_ij = az_i az_j and J^xx_ij = ax_i ax_j (ax may be empty).
SpinModel partitioning_model(const std::vector<double>& az, const std::vector<double>& ax = {});

struct QuenchSeries {
  int n_qubits = 0;
  std::vector<double> times;               // ns
  std::vector<std::vector<double>> z;      // [time][i]
  std::vector<std::vector<double>> zz;     // [time][pair index, i<j lexicographic]
  std::vector<double> energy;              // <H> (GHz)
  std::vector<double> norm;
};

QuenchSeries ising_quench(const SpinOperatorMatrix& h, const CVec& initial, double t_final, int steps);
QuenchSeries ising_quench(const ChainConfig& config, const CouplingReport& report, const SpinConfiguration& initial,
                          double t_final, int steps, int max_qubits = kDynamicsQubitCap);

}  // namespace asq
