#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asqchain/spin_core.hpp"

namespace asq {

enum class PhaseTag { On0, OnPi, OffPlus, OffMinus, Free };

std::string to_string(PhaseTag t);
PhaseTag phase_tag_from_string(const std::string& s);
inline bool is_on(PhaseTag t) { return t == PhaseTag::On0 || t == PhaseTag::OnPi; }

struct PhaseTarget {
  PhaseTag tag = PhaseTag::Free;
  double phase = 0.0;  // target for theta_i - phi_E (radians)
};

struct FluxPlan {
  std::vector<PhaseTarget> targets;
  std::vector<double> fluxes;  // Phi_i / Phi0 in [0, 1)
  double phase_offset_used = 0.0;
  bool converged = false;
  int iterations = 0;

  std::size_t size() const { return fluxes.size(); }
};

enum class Role { On, Off };

FluxPlan plan_idle(int n);

// Loop fluxes (Phi0, [0, 1)) that realise the given cumulative phase drops.
std::vector<double> fluxes_from_phases(const std::vector<double>& theta);

// Turns an explicit list of targets into fluxes. With a config carrying
// nonzero E_J,i the Etilde phase is found self-consistently.
FluxPlan realize_targets(std::vector<PhaseTarget> targets, const std::optional<ChainConfig>& config = std::nullopt);

// ON/OFF roles -> targets that minimise the total flux change from plan_idle.
// Ties prefer ON at 0 and OFF at +pi/2, from the first qubit on.
FluxPlan plan_roles(const std::vector<Role>& roles, const std::optional<ChainConfig>& config = std::nullopt);

// Qubits n and m (0-based) ON, the rest OFF.
FluxPlan plan_pair(int n, int m, const ChainConfig& config);

enum class AllToAllVariant { Uniform, Alternating };
FluxPlan plan_all_to_all(int n, AllToAllVariant variant, const std::optional<ChainConfig>& config = std::nullopt);

enum class ReadoutMode { OffTarget, OnTarget };
FluxPlan plan_readout(int target, ReadoutMode mode, int n, const std::optional<ChainConfig>& config = std::nullopt);

// Every qubit OFF at +pi/2, so that all spin-up states pull the readout the same way.
FluxPlan plan_joint_readout(int n, const std::optional<ChainConfig>& config = std::nullopt);

enum class PairClass { OnOn, OnOff, OffOff };
std::string to_string(PairClass c);

struct ClassSummary {
  std::size_t count = 0;
  double median = 0.0;
  double max = 0.0;
};

struct FluxNoiseRecord {
  int sample = 0;
  int i = 0, j = 0;
  PairClass cls = PairClass::OnOn;
  double j_ghz = 0.0;
};

struct FluxNoiseStats {
  std::vector<double> on_on, on_off, off_off;  // |J| (GHz)
  ClassSummary on_on_summary, on_off_summary, off_off_summary;
  std::vector<FluxNoiseRecord> records;  // filled on request only
};

// Uniform flux offsets in [-delta, delta] on every loop; sample k draws from
// its own stream derived from (seed, k).
FluxNoiseStats crosstalk_monte_carlo(const ChainConfig& config, const FluxPlan& plan, double delta, int samples,
                                     std::uint64_t seed, bool keep_records = false);

ClassSummary summarize(std::vector<double> values);

// Linear flux-bias model: fluxes = mutual * currents + offsets.
class BiasModel {
 public:
  BiasModel(RMat mutual, RVec offsets);
  const RMat& mutual() const { return mutual_; }
  const RVec& offsets() const { return offsets_; }
  // min_i |M_ii| / sum_{j != i} |M_ij| (infinite for a diagonal model)
  double dominance_ratio() const { return dominance_; }
  RVec fluxes(const RVec& currents_ua) const { return mutual_ * currents_ua + offsets_; }
  RVec currents(const RVec& fluxes) const;

 private:
  RMat mutual_;
  RVec offsets_;
  double dominance_;
};

// Currents (uA) that realise plan.fluxes exactly.
RVec currents_for_plan(const BiasModel& model, const FluxPlan& plan);

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace asq
