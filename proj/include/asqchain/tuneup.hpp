#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "asqchain/cqed_readout.hpp"
#include "asqchain/flux_planner.hpp"
#include "asqchain/spin_core.hpp"

namespace asq {

// Simulated chip with hidden ground truth. Only the readout circuit, the
// resonator and the nominal loop slope are "known by design".
class VirtualDevice {
 public:
  VirtualDevice(ChainConfig truth, BiasModel bias, ReadoutCircuit circuit, ResonatorSpec resonator, double noise,
                std::uint64_t seed, double nominal_slope = 0.01);

  std::size_t size() const { return truth_.size(); }
  const ReadoutCircuit& circuit() const { return circuit_; }
  const ResonatorSpec& resonator() const { return resonator_; }
  double noise() const { return noise_; }
  double nominal_slope() const { return nominal_slope_; }  // Phi0 / uA

  void set_pinched(std::size_t i, bool pinched);
  void pinch_all();
  bool pinched(std::size_t i) const { return pinched_.at(i) != 0; }
  bool all_pinched() const;

  // Stand-in for the field-induced change of the flux mappings between rounds.
  void shift_offsets(const RVec& delta_phi0);

  // Dressed resonator frequency (GHz) with Gaussian readout noise.
  double measure_resonator(const RVec& currents_ua, const SpinConfiguration& spins);
  // Bare 0->1 frequency of the readout circuit (two-tone spectroscopy).
  double measure_transition(const RVec& currents_ua, const SpinConfiguration& spins);

  // Hidden state; only used to score a calibration.
  const ChainConfig& truth() const { return truth_; }
  const BiasModel& bias() const { return bias_; }
  ChainConfig effective_config(const RVec& currents_ua) const;

 private:
  double noisy(double f);

  ChainConfig truth_;
  BiasModel bias_;
  ReadoutCircuit circuit_;
  ResonatorSpec resonator_;
  double noise_;
  double nominal_slope_;
  std::vector<char> pinched_;
  std::mt19937_64 rng_;
};

// What the calibration sweeps read: the dressed resonator (dispersive
// readout) or the circuit's own 0->1 line (two-tone spectroscopy).
enum class Probe { Resonator, Transition };
std::string to_string(Probe p);
Probe probe_from_string(const std::string& s);

// Exact inverse of the probed frequency as a function of |Etilde| (transmon readout).
class ResponseInverter {
 public:
  ResponseInverter(const ReadoutCircuit& circuit, const ResonatorSpec& resonator, double e_lo, double e_hi,
                   int grid = 241, Probe probe = Probe::Resonator);
  double forward(double e_abs) const;
  double inverse(double f_ghz) const;  // |Etilde| in GHz

 private:
  ReadoutCircuit circuit_;
  ResonatorSpec resonator_;
  Probe probe_;
  std::vector<double> x_, f_;
};

struct QubitCalibration {
  int index = 0;
  double e_so = 0.0;          // GHz
  double e_j = 0.0;           // GHz
  bool spin_flagged = false;  // no resolvable spin splitting
  double slope = 0.0;         // effective dTheta_i/dI_i (Phi0/uA)
  double offset = 0.0;        // Theta_i at I_i = 0 during the sweep (Phi0)
  double current_zero = 0.0;  // uA
  double current_phi0 = 0.0;  // uA
  double mean_sq = 0.0;       // fitted mean of |Etilde|^2 (GHz^2)
  double fit_rms = 0.0;       // GHz, weighted fit residual (frequency units)
};

struct Calibration {
  double e_j = 0.0;
  std::vector<QubitCalibration> qubits;
  bool remapped = false;
  RMat mutual;            // recovered Phi0/uA
  RVec offsets;           // Phi0
  RVec currents_zero;     // every loop at Phi = 0
  RMat currents_phi0;     // row i: loop i at Phi0, others at 0
};

struct TuneupOptions {
  int points_per_period = 41;
  bool remap = true;
  Probe probe = Probe::Resonator;
  RVec field_offset_shift;  // applied to the device before the remap round (empty: none)
};

double estimate_coupling_ej(VirtualDevice& device);

// Sweeps I_i with base currents for the other loops; qubit i must be the only open one.
QubitCalibration calibrate_qubit(VirtualDevice& device, int i, double e_j_estimate, const RVec& base_currents,
                                 const TuneupOptions& opt = {});

// Crosstalk round: fits how every current moves every cumulative phase and
// rebuilds the full linear bias model.
void remap_bias(VirtualDevice& device, Calibration& cal, const TuneupOptions& opt = {});

struct TruthRow {
  std::string quantity;
  double truth = 0.0;
  double estimate = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

struct TuneupResult {
  Calibration calibration;
  std::vector<TruthRow> report;
};

TuneupResult run_tuneup(VirtualDevice& device, const TuneupOptions& opt = {});

// Scores a calibration against the hidden device state.
std::vector<TruthRow> truth_report(const VirtualDevice& device, const Calibration& cal);

}  // namespace asq
