#include <doctest.h>

#include <string>

#include "asqchain/config.hpp"

using namespace asq;

namespace {
ScenarioSpec shipped(const std::string& name) {
  return load_config(std::string(ASQCHAIN_SCENARIO_DIR) + "/" + name + ".json");
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("minimal single-qubit config takes defaults") {
  const auto s = parse_config(std::string(R"({"schema_version": 1, "chain": {"e_j": 10, "asqs": [{"e_so": 0.3}]},
    "readout": {"circuit": {"kind": "transmon", "e_c": 1}, "resonator": {"f_bare": 5.5, "g": 0.2}}})"));
  CHECK(s.name == "run");
  CHECK(s.seed == 0);
  REQUIRE(s.readout);
  CHECK(s.readout->circuit.n_g == 0.0);
  CHECK(s.readout->circuit.basis_size == 41);
  CHECK(s.readout->resonator.levels == 8);
  CHECK(s.readout->circuit_states == 8);
  CHECK(s.chain->fluxes() == std::vector<double>{0.0});
}

TEST_CASE("rejections name the offending field") {
  CHECK(error_of(R"({"schema_version": 1, "colour": 3})").find("colour") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "chain": {"e_j": 10, "asqs": [{"e_so": 0.3, "gain": 1}]}})")
            .find("/chain/asqs/0") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 2})").find("schema_version") != std::string::npos);
  CHECK(error_of(R"({"chain": {}})").find("schema_version") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "chain": {"e_j": "ten", "asqs": [{}]}})").find("e_j") !=
        std::string::npos);
  // syntax errors carry line:column
  CHECK(error_of("{\n  \"schema_version\": 1,\n  \"name\": }").find("t.json:3:") != std::string::npos);
}

TEST_CASE("sweep validation") {
  const std::string head = R"({"schema_version": 1, "command": "couplings",
    "chain": {"e_j": 10, "uniform": {"e_so": 0.3}, "n_qubits": 2}, )";
  CHECK(error_of(head + R"("sweep": {"variable": "phase", "start": 1, "stop": 1, "points": 5}})").find("empty") !=
        std::string::npos);
  CHECK(error_of(head + R"("sweep": {"variable": "phase", "start": 0, "stop": 1, "points": 1}})").find("points") !=
        std::string::npos);
  CHECK(error_of(head + R"("sweep": {"variable": "delta", "start": 0, "stop": 1, "points": 3}})").find("delta") !=
        std::string::npos);
  CHECK(error_of(head + R"("sweep": {"variable": "phase", "start": 0, "stop": 1, "points": 3, "qubit": 3}})")
            .find("out of range") != std::string::npos);
  CHECK(error_of(head + R"("outputs": ["timeseries"]})").find("timeseries") != std::string::npos);
}

TEST_CASE("shipped scenarios carry their reference parameters") {
  const auto f5 = shipped("fig5");
  CHECK(f5.chain->e_j_coupling() == 10.0);
  CHECK(f5.chain->asq(0).e_so == 3.0);
  CHECK(f5.readout->circuit.kind == CircuitKind::Transmon);
  CHECK(f5.readout->circuit.e_c == 1.0);
  CHECK(f5.readout->resonator.f_bare == 5.5);
  CHECK(f5.readout->resonator.g == 0.2);
  CHECK(f5.sweep->points == 101);

  const auto f6 = shipped("fig6");
  CHECK(f6.readout->circuit.kind == CircuitKind::Fluxonium);
  CHECK(f6.readout->circuit.e_c == 4.0);
  CHECK(f6.readout->circuit.e_l == 0.3);
  CHECK(f6.chain->asq(0).e_so == 1.5);
  CHECK(f6.readout->resonator.f_bare == 6.6);
  CHECK(f6.readout->resonator.g == 0.3);

  const auto f3 = shipped("fig3c");
  CHECK(f3.chain->size() == 10);
  CHECK(f3.plan->pair == std::vector<int>{3, 8});
  CHECK(f3.crosstalk->delta == 0.001);
  CHECK(f3.crosstalk->samples >= 1000);

  const auto f1 = shipped("fig1c");
  CHECK(f1.chain->asq(0).e_so == 0.3);
  CHECK(f1.chain->asq(0).e_j == 0.0);
}

TEST_CASE("explicit form round-trips") {
  for (const char* name : {"fig1c", "fig1d", "fig3c", "fig5", "fig6", "fig7", "cphase", "spectator", "quench"}) {
    INFO(name);
    const auto s = shipped(name);
    const auto j = to_json(s);
    CHECK(to_json(parse_config(j)) == j);
  }
}

TEST_CASE("plans resolve with 1-based qubit numbers") {
  const auto s = parse_config(std::string(R"({"schema_version": 1, "command": "plan",
    "chain": {"e_j": 10, "uniform": {"e_so": 0.3}, "n_qubits": 3},
    "plan": {"mode": "targets", "targets": ["on-0", "off-minus", 0.5]}})"));
  const auto p = resolve_plan(s);
  CHECK(p.targets[0].tag == PhaseTag::On0);
  CHECK(p.targets[1].tag == PhaseTag::OffMinus);
  CHECK(p.targets[2].tag == PhaseTag::Free);
  CHECK(p.targets[2].phase == doctest::Approx(0.5));
  CHECK(error_of(R"({"schema_version": 1, "command": "plan",
    "chain": {"e_j": 10, "uniform": {"e_so": 0.3}, "n_qubits": 3},
    "plan": {"mode": "pair", "pair": [0, 2]}})").find("out of range") != std::string::npos);
}
