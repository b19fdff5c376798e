#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "asqchain/config.hpp"

namespace asq {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;
  std::string units;  // written as a leading "# units: ..." comment
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct RunResult {
  nlohmann::json summary;                          // headline numbers
  std::vector<Table> tables;                       // CSV (or JSON) tables
  std::map<std::string, nlohmann::json> documents; // always JSON (gate, calibration)
};

enum class OutputFormat { Csv, Json };
OutputFormat output_format_from_string(const std::string& s);

// Runs spec.command. Validation problems throw ValidationError, solver failures ConvergenceError.
RunResult run_scenario(const ScenarioSpec& spec);

std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);

// Writes <out>/<name>_<table>.{csv,json}, <out>/<name>_<doc>.json and
// <out>/<name>_summary.json. Returns the paths written.
std::vector<std::string> write_outputs(const RunResult& r, const ScenarioSpec& spec, const std::string& out_dir,
                                       OutputFormat fmt);

// Summary envelope: {"schema_version", "kind": "summary", "config", "results"}.
nlohmann::json summary_document(const RunResult& r, const ScenarioSpec& spec);
// Re-validates a summary: envelope fields plus the embedded config.
ScenarioSpec validate_summary(const nlohmann::json& summary);

}  // namespace asq
