#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asqchain/cqed_readout.hpp"
#include "asqchain/flux_planner.hpp"
#include "asqchain/spin_core.hpp"

namespace asq {

inline constexpr int kSchemaVersion = 1;

// Qubit indices in config files are 1-based.
struct PlanSpec {
  std::string mode = "idle";  // idle | pair | all_to_all | readout | joint_readout | roles | targets
  std::vector<int> pair;
  std::string variant = "uniform";
  int target = 1;
  std::string readout_mode = "off-target";
  std::vector<std::string> roles;
  nlohmann::json targets;  // tag strings or phases in radians
};

struct ReadoutSpec {
  ReadoutCircuit circuit;
  ResonatorSpec resonator;
  int circuit_states = 8;
  int target = 1;
};

struct SweepSpec {
  std::string variable;
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  std::string scale = "linear";  // linear | log
  int qubit = 1;
  int partner = 2;
  std::vector<double> values() const;
};

struct CrosstalkSpec {
  double delta = 0.001;  // Phi0
  int samples = 1000;
  bool records = true;
};

struct DynamicsSpec {
  std::string mode = "cphase";  // cphase | spectator | quench
  std::vector<int> pair{1, 2};
  std::optional<double> j_ghz;  // ideal ZZ pair instead of the chain
  int n_qubits = 2;
  std::vector<int> spectators;  // full-length +-1, pair entries ignored
  bool include_triples = true;
  // spectator
  std::vector<double> epsilons{1e-4, 1e-3, 1e-2};
  std::vector<int> n_values{3, 4, 5, 6};
  std::string variant = "three-body-only";
  double target_fidelity = 0.99;
  // quench
  double t_final = 100.0;  // ns
  int steps = 200;
  std::vector<int> initial;
  std::vector<double> az, ax;
};

struct TuneupSpec {
  double noise = 0.0;  // GHz
  std::vector<std::vector<double>> mutual;  // Phi0 / uA
  std::vector<double> offsets;               // Phi0
  double nominal_slope = 0.01;
  int points_per_period = 41;
  bool remap = true;
  std::string probe = "resonator";  // resonator | transition
  std::vector<double> field_offset_shift;
};

struct ScenarioSpec {
  int schema_version = kSchemaVersion;
  std::string name = "run";
  std::string description;
  std::string command;
  std::uint64_t seed = 0;
  std::optional<ChainConfig> chain;
  std::optional<PlanSpec> plan;
  std::optional<ReadoutSpec> readout;
  std::optional<SweepSpec> sweep;
  std::optional<CrosstalkSpec> crosstalk;
  std::optional<DynamicsSpec> dynamics;
  std::optional<TuneupSpec> tuneup;
  std::vector<std::string> outputs;
};

const std::vector<std::string>& known_commands();
const std::vector<std::string>& tables_for(const std::string& command);

ScenarioSpec parse_config(const std::string& text, const std::string& source = "<string>");
ScenarioSpec parse_config(const nlohmann::json& j, const std::string& source = "<json>");
ScenarioSpec load_config(const std::string& path);

// Fully explicit form (defaults filled in); parse_config(to_json(s)) == s.
nlohmann::json to_json(const ScenarioSpec& s);

// Validates command-specific requirements (sections, sweep variables, tables).
void validate_for_command(const ScenarioSpec& s);

FluxPlan resolve_plan(const ScenarioSpec& s);
// Chain with the plan's fluxes applied (if a plan is given).
ChainConfig resolved_chain(const ScenarioSpec& s);

}  // namespace asq
