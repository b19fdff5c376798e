#include "asqchain/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "asqchain/dynamics.hpp"
#include "asqchain/tuneup.hpp"

namespace asq {

using nlohmann::json;

namespace {

std::string type_name(const json& v) { return v.type_name(); }

// Object reader that remembers which keys were consumed so that leftovers
// can be reported as unknown fields.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object, got " + type_name(j_));
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  const json& raw(const std::string& k) const {
    used_.insert(k);
    return j_.at(k);
  }

  std::string at(const std::string& k) const { return path_ + "/" + k; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("field " + (path_.empty() ? std::string("/") : path_) + ": " + msg);
  }

  template <class T>
  T req(const std::string& k) const {
    if (!has(k)) fail("missing required field '" + k + "'");
    return convert<T>(raw(k), at(k));
  }

  template <class T>
  T opt(const std::string& k, T def) const {
    if (!has(k)) return def;
    return convert<T>(raw(k), at(k));
  }

  Reader child(const std::string& k) const { return Reader(raw(k), at(k)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail("unknown field '" + it.key() + "'");
  }

  template <class T>
  static T convert(const json& v, const std::string& where);

 private:
  const json& j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

[[noreturn]] void bad(const std::string& where, const std::string& what, const json& v) {
  throw ValidationError("field " + where + ": expected " + what + ", got " + type_name(v));
}

template <>
double Reader::convert<double>(const json& v, const std::string& w) {
  if (!v.is_number()) bad(w, "a number", v);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError("field " + w + ": must be finite");
  return d;
}

template <>
int Reader::convert<int>(const json& v, const std::string& w) {
  if (!v.is_number_integer()) bad(w, "an integer", v);
  const auto x = v.get<long long>();
  if (x < -2147483647LL || x > 2147483647LL) throw ValidationError("field " + w + ": integer out of range");
  return static_cast<int>(x);
}

template <>
std::uint64_t Reader::convert<std::uint64_t>(const json& v, const std::string& w) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<long long>() < 0) throw ValidationError("field " + w + ": must be >= 0");
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  bad(w, "a non-negative integer", v);
}

template <>
bool Reader::convert<bool>(const json& v, const std::string& w) {
  if (!v.is_boolean()) bad(w, "a boolean", v);
  return v.get<bool>();
}

template <>
std::string Reader::convert<std::string>(const json& v, const std::string& w) {
  if (!v.is_string()) bad(w, "a string", v);
  return v.get<std::string>();
}

template <>
std::vector<double> Reader::convert<std::vector<double>>(const json& v, const std::string& w) {
  if (!v.is_array()) bad(w, "an array of numbers", v);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<double>(v[i], w + "/" + std::to_string(i)));
  return out;
}

template <>
std::vector<int> Reader::convert<std::vector<int>>(const json& v, const std::string& w) {
  if (!v.is_array()) bad(w, "an array of integers", v);
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<int>(v[i], w + "/" + std::to_string(i)));
  return out;
}

template <>
std::vector<std::string> Reader::convert<std::vector<std::string>>(const json& v, const std::string& w) {
  if (!v.is_array()) bad(w, "an array of strings", v);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(convert<std::string>(v[i], w + "/" + std::to_string(i)));
  return out;
}

template <>
std::vector<std::vector<double>> Reader::convert<std::vector<std::vector<double>>>(const json& v,
                                                                                    const std::string& w) {
  if (!v.is_array()) bad(w, "an array of arrays", v);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(convert<std::vector<double>>(v[i], w + "/" + std::to_string(i)));
  return out;
}

AsqParams read_asq(const Reader& r) {
  AsqParams p;
  p.e_so = r.opt<double>("e_so", 0.0);
  p.e_j = r.opt<double>("e_j", 0.0);
  p.e_z = r.opt<double>("e_z", 0.0);
  p.theta = r.opt<double>("theta", 0.0);
  r.finish();
  return p;
}

ChainConfig read_chain(const Reader& r, bool plan_given) {
  const double e_j = r.req<double>("e_j");
  std::vector<AsqParams> asqs;
  if (r.has("asqs") && r.has("uniform")) r.fail("'asqs' and 'uniform' are exclusive");
  if (r.has("asqs")) {
    const json& arr = r.raw("asqs");
    if (!arr.is_array()) bad(r.at("asqs"), "an array", arr);
    for (std::size_t i = 0; i < arr.size(); ++i) asqs.push_back(read_asq(Reader(arr[i], r.at("asqs") + "/" + std::to_string(i))));
  } else if (r.has("uniform")) {
    const int n = r.req<int>("n_qubits");
    if (n < 1) r.fail("n_qubits must be >= 1");
    asqs.assign(static_cast<std::size_t>(n), read_asq(r.child("uniform")));
  } else {
    r.fail("missing 'asqs' (or 'uniform' with 'n_qubits')");
  }
  if (r.has("n_qubits") && !r.has("uniform")) {
    const int n = r.req<int>("n_qubits");
    if (n != static_cast<int>(asqs.size())) r.fail("n_qubits does not match the asqs list");
  }
  if (asqs.empty()) r.fail("chain needs at least one ASQ");
  std::vector<double> fluxes(asqs.size(), 0.0);
  if (r.has("fluxes")) {
    if (plan_given) r.fail("'fluxes' and a 'plan' section are exclusive");
    fluxes = r.req<std::vector<double>>("fluxes");
    if (fluxes.size() != asqs.size()) r.fail("fluxes must list one value per ASQ");
  }
  r.finish();
  return ChainConfig(e_j, std::move(asqs), std::move(fluxes));
}

PlanSpec read_plan(const Reader& r) {
  PlanSpec p;
  p.mode = r.opt<std::string>("mode", "idle");
  static const std::set<std::string> modes{"idle", "pair", "all_to_all", "readout", "joint_readout", "roles", "targets"};
  if (!modes.count(p.mode)) r.fail("unknown plan mode '" + p.mode + "'");
  p.pair = r.opt<std::vector<int>>("pair", {});
  p.variant = r.opt<std::string>("variant", "uniform");
  p.target = r.opt<int>("target", 1);
  p.readout_mode = r.opt<std::string>("readout_mode", "off-target");
  p.roles = r.opt<std::vector<std::string>>("roles", {});
  if (r.has("targets")) {
    p.targets = r.raw("targets");
    if (!p.targets.is_array()) bad(r.at("targets"), "an array", p.targets);
  }
  if (p.mode == "pair" && p.pair.size() != 2) r.fail("pair mode needs 'pair': [n, m]");
  if (p.variant != "uniform" && p.variant != "alternating") r.fail("variant must be 'uniform' or 'alternating'");
  if (p.readout_mode != "off-target" && p.readout_mode != "on-target")
    r.fail("readout_mode must be 'off-target' or 'on-target'");
  if (p.mode == "roles" && p.roles.empty()) r.fail("roles mode needs a 'roles' list");
  if (p.mode == "targets" && p.targets.empty()) r.fail("targets mode needs a 'targets' list");
  r.finish();
  return p;
}

ReadoutSpec read_readout(const Reader& r) {
  ReadoutSpec s;
  const Reader c = r.child("circuit");
  const std::string kind = c.req<std::string>("kind");
  if (kind == "transmon") {
    s.circuit = ReadoutCircuit::transmon(c.req<double>("e_c"), c.opt<double>("n_g", 0.0), c.opt<int>("basis_size", 41));
  } else if (kind == "fluxonium") {
    s.circuit = ReadoutCircuit::fluxonium(c.req<double>("e_c"), c.req<double>("e_l"),
                                          kTwoPi * c.opt<double>("loop_flux", 0.0), c.opt<int>("basis_size", 120));
  } else {
    c.fail("kind must be 'transmon' or 'fluxonium'");
  }
  c.finish();
  const Reader res = r.child("resonator");
  s.resonator.f_bare = res.req<double>("f_bare");
  s.resonator.g = res.req<double>("g");
  s.resonator.levels = res.opt<int>("levels", 8);
  res.finish();
  s.circuit_states = r.opt<int>("circuit_states", 8);
  s.target = r.opt<int>("target", 1);
  r.finish();
  s.circuit.validate();
  s.resonator.validate();
  if (s.circuit_states < 2) r.fail("circuit_states must be >= 2");
  return s;
}

SweepSpec read_sweep(const Reader& r) {
  SweepSpec s;
  s.variable = r.req<std::string>("variable");
  s.start = r.req<double>("start");
  s.stop = r.req<double>("stop");
  s.points = r.req<int>("points");
  s.scale = r.opt<std::string>("scale", "linear");
  s.qubit = r.opt<int>("qubit", 1);
  s.partner = r.opt<int>("partner", 2);
  r.finish();
  if (s.points < 2) r.fail("points must be >= 2");
  if (!(s.stop != s.start)) r.fail("empty sweep range (start == stop)");
  if (s.scale != "linear" && s.scale != "log") r.fail("scale must be 'linear' or 'log'");
  if (s.scale == "log" && !(s.start > 0.0 && s.stop > 0.0)) r.fail("log sweeps need positive bounds");
  return s;
}

CrosstalkSpec read_crosstalk(const Reader& r) {
  CrosstalkSpec s;
  s.delta = r.opt<double>("delta", 0.001);
  s.samples = r.opt<int>("samples", 1000);
  s.records = r.opt<bool>("records", true);
  r.finish();
  if (!(s.delta >= 0.0)) r.fail("delta must be >= 0");
  if (s.samples < 1) r.fail("samples must be >= 1");
  return s;
}

DynamicsSpec read_dynamics(const Reader& r) {
  DynamicsSpec s;
  s.mode = r.opt<std::string>("mode", "cphase");
  if (s.mode != "cphase" && s.mode != "spectator" && s.mode != "quench")
    r.fail("mode must be 'cphase', 'spectator' or 'quench'");
  s.pair = r.opt<std::vector<int>>("pair", {1, 2});
  if (r.has("j_ghz")) s.j_ghz = r.req<double>("j_ghz");
  s.n_qubits = r.opt<int>("n_qubits", 2);
  s.spectators = r.opt<std::vector<int>>("spectators", {});
  s.include_triples = r.opt<bool>("include_triples", true);
  s.epsilons = r.opt<std::vector<double>>("epsilons", s.epsilons);
  s.n_values = r.opt<std::vector<int>>("n_values", s.n_values);
  s.variant = r.opt<std::string>("variant", s.variant);
  s.target_fidelity = r.opt<double>("target_fidelity", s.target_fidelity);
  s.t_final = r.opt<double>("t_final", s.t_final);
  s.steps = r.opt<int>("steps", s.steps);
  s.initial = r.opt<std::vector<int>>("initial", {});
  s.az = r.opt<std::vector<double>>("az", {});
  s.ax = r.opt<std::vector<double>>("ax", {});
  r.finish();
  if (s.pair.size() != 2) r.fail("pair must have two entries");
  spectator_variant_from_string(s.variant);
  return s;
}

TuneupSpec read_tuneup(const Reader& r) {
  TuneupSpec s;
  s.noise = r.opt<double>("noise", 0.0);
  s.mutual = r.opt<std::vector<std::vector<double>>>("mutual", {});
  s.offsets = r.opt<std::vector<double>>("offsets", {});
  s.nominal_slope = r.opt<double>("nominal_slope", 0.01);
  s.points_per_period = r.opt<int>("points_per_period", 41);
  s.remap = r.opt<bool>("remap", true);
  s.probe = r.opt<std::string>("probe", "resonator");
  s.field_offset_shift = r.opt<std::vector<double>>("field_offset_shift", {});
  r.finish();
  if (!(s.noise >= 0.0)) r.fail("noise must be >= 0");
  if (s.probe != "resonator" && s.probe != "transition") r.fail("probe must be 'resonator' or 'transition'");
  return s;
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  std::vector<double> v;
  for (int k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) / (points - 1);
    v.push_back(scale == "log" ? start * std::pow(stop / start, t) : start + (stop - start) * t);
  }
  return v;
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c{"couplings", "supercurrent", "plan",     "crosstalk-mc",
                                          "readout",   "dispersive",   "dynamics", "tuneup"};
  return c;
}

const std::vector<std::string>& tables_for(const std::string& command) {
  static const std::map<std::string, std::vector<std::string>> t{
      {"couplings", {"couplings", "curve"}},
      {"supercurrent", {"curve"}},
      {"plan", {"plan"}},
      {"crosstalk-mc", {"samples", "delta_sweep"}},
      {"readout", {"states", "ladder"}},
      {"dispersive", {"sweep"}},
      {"dynamics", {"gate", "spectator", "timeseries"}},
      {"tuneup", {"calibration", "truth"}},
  };
  const auto it = t.find(command);
  if (it == t.end()) throw ValidationError("unknown command '" + command + "'");
  return it->second;
}

ScenarioSpec parse_config(const json& j, const std::string& source) {
  try {
    const Reader r(j, "");
    ScenarioSpec s;
    if (!r.has("schema_version")) r.fail("missing required field 'schema_version'");
    s.schema_version = r.req<int>("schema_version");
    if (s.schema_version != kSchemaVersion)
      throw ValidationError("schema_version mismatch: file has " + std::to_string(s.schema_version) +
                            ", this build reads " + std::to_string(kSchemaVersion));
    s.name = r.opt<std::string>("name", "run");
    if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos)
      r.fail("name must be a non-empty identifier without path separators");
    s.description = r.opt<std::string>("description", "");
    s.command = r.opt<std::string>("command", "");
    if (!s.command.empty()) tables_for(s.command);
    s.seed = r.opt<std::uint64_t>("seed", 0);
    if (r.has("plan")) s.plan = read_plan(r.child("plan"));
    if (r.has("chain")) s.chain = read_chain(r.child("chain"), s.plan.has_value());
    if (r.has("readout")) s.readout = read_readout(r.child("readout"));
    if (r.has("sweep")) s.sweep = read_sweep(r.child("sweep"));
    if (r.has("crosstalk")) s.crosstalk = read_crosstalk(r.child("crosstalk"));
    if (r.has("dynamics")) s.dynamics = read_dynamics(r.child("dynamics"));
    if (r.has("tuneup")) s.tuneup = read_tuneup(r.child("tuneup"));
    s.outputs = r.opt<std::vector<std::string>>("outputs", {});
    r.finish();
    if (!s.command.empty()) validate_for_command(s);
    return s;
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

ScenarioSpec parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    const auto p = what.find("parse error");
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON " +
                          (p == std::string::npos ? what : what.substr(p)));
  }
  return parse_config(j, source);
}

ScenarioSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void validate_for_command(const ScenarioSpec& s) {
  const auto& cmd = s.command;
  const auto& tables = tables_for(cmd);
  for (const auto& o : s.outputs)
    if (std::find(tables.begin(), tables.end(), o) == tables.end())
      throw ValidationError("output table '" + o + "' is not produced by '" + cmd + "'");

  auto need = [&](bool ok, const char* what) {
    if (!ok) throw ValidationError("command '" + cmd + "' needs a '" + what + "' section");
  };
  static const std::map<std::string, std::set<std::string>> sweep_vars{
      {"couplings", {"phase"}},  {"supercurrent", {"phase"}}, {"crosstalk-mc", {"delta"}},
      {"dispersive", {"flux", "loop_flux"}}, {"dynamics", {"epsilon"}}};
  if (s.sweep) {
    const auto it = sweep_vars.find(cmd);
    if (it == sweep_vars.end()) throw ValidationError("command '" + cmd + "' takes no sweep");
    if (!it->second.count(s.sweep->variable))
      throw ValidationError("sweep variable '" + s.sweep->variable + "' is not a field of '" + cmd + "'");
  }
  const int n = s.chain ? static_cast<int>(s.chain->size()) : 0;
  auto check_qubit = [&](int q, const char* what) {
    if (q < 1 || q > n)
      throw ValidationError(std::string(what) + " " + std::to_string(q) + " out of range 1.." + std::to_string(n));
  };

  if (cmd == "couplings" || cmd == "plan" || cmd == "crosstalk-mc" || cmd == "readout" || cmd == "dispersive" ||
      cmd == "tuneup" || cmd == "supercurrent")
    need(s.chain.has_value(), "chain");
  if (s.plan) {
    need(s.chain.has_value(), "chain");
    for (int q : s.plan->pair) check_qubit(q, "plan qubit");
    if (s.plan->mode == "readout") check_qubit(s.plan->target, "plan target");
  }
  if (cmd == "supercurrent") {
    need(s.sweep.has_value(), "sweep");
    check_qubit(s.sweep->qubit, "sweep qubit");
  }
  if (cmd == "couplings" && s.sweep) {
    check_qubit(s.sweep->qubit, "sweep qubit");
    check_qubit(s.sweep->partner, "sweep partner");
    if (s.sweep->qubit == s.sweep->partner) throw ValidationError("sweep qubit and partner must differ");
  }
  if (cmd == "plan") need(s.plan.has_value(), "plan");
  if (cmd == "crosstalk-mc") {
    need(s.plan.has_value(), "plan");
    need(s.crosstalk.has_value(), "crosstalk");
  }
  if (cmd == "readout" || cmd == "dispersive" || cmd == "tuneup") need(s.readout.has_value(), "readout");
  if (cmd == "dispersive") {
    need(s.sweep.has_value(), "sweep");
    check_qubit(s.readout->target, "readout target");
    const bool flux = s.readout->circuit.kind == CircuitKind::Fluxonium;
    if (flux != (s.sweep->variable == "loop_flux"))
      throw ValidationError("dispersive sweeps use 'loop_flux' for fluxonium and 'flux' for transmon readout");
  }
  if (cmd == "dynamics") {
    need(s.dynamics.has_value(), "dynamics");
    const auto& d = *s.dynamics;
    if (d.mode == "cphase" && !d.j_ghz) need(s.chain.has_value(), "chain");
    if (d.mode == "quench" && d.az.empty()) need(s.chain.has_value(), "chain");
    if (s.sweep && d.mode != "spectator") throw ValidationError("only spectator dynamics take an epsilon sweep");
  }
  if (cmd == "tuneup") {
    need(s.tuneup.has_value(), "tuneup");
    if (s.readout->circuit.kind != CircuitKind::Transmon)
      throw ValidationError("tune-up simulation supports transmon readout only");
    const auto& t = *s.tuneup;
    if (!t.mutual.empty() && t.mutual.size() != static_cast<std::size_t>(n))
      throw ValidationError("tuneup.mutual must be " + std::to_string(n) + "x" + std::to_string(n));
    for (const auto& row : t.mutual)
      if (row.size() != static_cast<std::size_t>(n))
        throw ValidationError("tuneup.mutual must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!t.offsets.empty() && t.offsets.size() != static_cast<std::size_t>(n))
      throw ValidationError("tuneup.offsets must list one value per loop");
    if (!t.field_offset_shift.empty() && t.field_offset_shift.size() != static_cast<std::size_t>(n))
      throw ValidationError("tuneup.field_offset_shift must list one value per loop");
  }
}

FluxPlan resolve_plan(const ScenarioSpec& s) {
  if (!s.chain) throw ValidationError("a plan needs a chain");
  if (!s.plan) return FluxPlan{{}, s.chain->fluxes(), 0.0, true, 0};
  const auto& p = *s.plan;
  const int n = static_cast<int>(s.chain->size());
  const auto& cfg = *s.chain;
  if (p.mode == "idle") return realize_targets(plan_idle(n).targets, cfg);
  if (p.mode == "pair") return plan_pair(p.pair[0] - 1, p.pair[1] - 1, cfg);
  if (p.mode == "all_to_all")
    return plan_all_to_all(n, p.variant == "uniform" ? AllToAllVariant::Uniform : AllToAllVariant::Alternating, cfg);
  if (p.mode == "readout")
    return plan_readout(p.target - 1, p.readout_mode == "on-target" ? ReadoutMode::OnTarget : ReadoutMode::OffTarget,
                        n, cfg);
  if (p.mode == "joint_readout") return plan_joint_readout(n, cfg);
  if (p.mode == "roles") {
    if (static_cast<int>(p.roles.size()) != n) throw ValidationError("roles must list one entry per qubit");
    std::vector<Role> roles;
    for (const auto& r : p.roles) {
      if (r == "on")
        roles.push_back(Role::On);
      else if (r == "off")
        roles.push_back(Role::Off);
      else
        throw ValidationError("role must be 'on' or 'off', got '" + r + "'");
    }
    return plan_roles(roles, cfg);
  }
  // explicit targets: tag strings or free phases (radians)
  if (static_cast<int>(p.targets.size()) != n) throw ValidationError("targets must list one entry per qubit");
  std::vector<PhaseTarget> t;
  for (const auto& v : p.targets) {
    if (v.is_number()) {
      t.push_back({PhaseTag::Free, v.get<double>()});
    } else if (v.is_string()) {
      const PhaseTag tag = phase_tag_from_string(v.get<std::string>());
      const double ph = tag == PhaseTag::On0 ? 0.0 : tag == PhaseTag::OnPi ? kPi : tag == PhaseTag::OffPlus ? kPi / 2 : -kPi / 2;
      if (tag == PhaseTag::Free) throw ValidationError("'free' targets must be given as a phase in radians");
      t.push_back({tag, ph});
    } else {
      throw ValidationError("targets entries must be tag strings or numbers");
    }
  }
  return realize_targets(t, cfg);
}

ChainConfig resolved_chain(const ScenarioSpec& s) {
  if (!s.chain) throw ValidationError("no chain section");
  if (!s.plan) return *s.chain;
  return s.chain->with_fluxes(resolve_plan(s).fluxes);
}

json to_json(const ScenarioSpec& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  if (!s.command.empty()) j["command"] = s.command;
  j["seed"] = s.seed;
  if (s.chain) {
    json c;
    c["e_j"] = s.chain->e_j_coupling();
    json arr = json::array();
    for (const auto& a : s.chain->asqs()) arr.push_back({{"e_so", a.e_so}, {"e_j", a.e_j}, {"e_z", a.e_z}, {"theta", a.theta}});
    c["asqs"] = arr;
    if (!s.plan) c["fluxes"] = s.chain->fluxes();
    j["chain"] = c;
  }
  if (s.plan) {
    const auto& p = *s.plan;
    json o{{"mode", p.mode}, {"variant", p.variant}, {"target", p.target}, {"readout_mode", p.readout_mode}};
    if (!p.pair.empty()) o["pair"] = p.pair;
    if (!p.roles.empty()) o["roles"] = p.roles;
    if (!p.targets.is_null()) o["targets"] = p.targets;
    j["plan"] = o;
  }
  if (s.readout) {
    const auto& r = *s.readout;
    json c{{"kind", to_string(r.circuit.kind)}, {"e_c", r.circuit.e_c}, {"basis_size", r.circuit.basis_size}};
    if (r.circuit.kind == CircuitKind::Transmon) {
      c["n_g"] = r.circuit.n_g;
    } else {
      c["e_l"] = r.circuit.e_l;
      c["loop_flux"] = r.circuit.loop_flux / kTwoPi;
    }
    j["readout"] = {{"circuit", c},
                    {"resonator", {{"f_bare", r.resonator.f_bare}, {"g", r.resonator.g}, {"levels", r.resonator.levels}}},
                    {"circuit_states", r.circuit_states},
                    {"target", r.target}};
  }
  if (s.sweep) {
    const auto& w = *s.sweep;
    j["sweep"] = {{"variable", w.variable}, {"start", w.start}, {"stop", w.stop},   {"points", w.points},
                  {"scale", w.scale},       {"qubit", w.qubit}, {"partner", w.partner}};
  }
  if (s.crosstalk)
    j["crosstalk"] = {{"delta", s.crosstalk->delta}, {"samples", s.crosstalk->samples}, {"records", s.crosstalk->records}};
  if (s.dynamics) {
    const auto& d = *s.dynamics;
    json o{{"mode", d.mode},
           {"pair", d.pair},
           {"n_qubits", d.n_qubits},
           {"include_triples", d.include_triples},
           {"epsilons", d.epsilons},
           {"n_values", d.n_values},
           {"variant", d.variant},
           {"target_fidelity", d.target_fidelity},
           {"t_final", d.t_final},
           {"steps", d.steps}};
    if (d.j_ghz) o["j_ghz"] = *d.j_ghz;
    if (!d.spectators.empty()) o["spectators"] = d.spectators;
    if (!d.initial.empty()) o["initial"] = d.initial;
    if (!d.az.empty()) o["az"] = d.az;
    if (!d.ax.empty()) o["ax"] = d.ax;
    j["dynamics"] = o;
  }
  if (s.tuneup) {
    const auto& t = *s.tuneup;
    json o{{"noise", t.noise},
           {"nominal_slope", t.nominal_slope},
           {"points_per_period", t.points_per_period},
           {"probe", t.probe},
           {"remap", t.remap}};
    if (!t.mutual.empty()) o["mutual"] = t.mutual;
    if (!t.offsets.empty()) o["offsets"] = t.offsets;
    if (!t.field_offset_shift.empty()) o["field_offset_shift"] = t.field_offset_shift;
    j["tuneup"] = o;
  }
  if (!s.outputs.empty()) j["outputs"] = s.outputs;
  return j;
}

}  // namespace asq
