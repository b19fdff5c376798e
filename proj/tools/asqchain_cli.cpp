// Command-line front end: one subcommand per analysis plus `scenario run`.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "asqchain/harness.hpp"

#ifndef ASQCHAIN_SCENARIO_DIR
#define ASQCHAIN_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string format = "csv";
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c, bool need_config) {
  auto* opt = sub->add_option("--config", c.config, "scenario config (JSON)");
  if (need_config) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "overrides the seed in the config");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_flag("-q,--quiet", c.quiet, "do not print the summary");
}

// Search order: as given, <dir>/<name>.json for --scenario-dir, $ASQCHAIN_SCENARIOS, the install default.
std::string find_scenario(const std::string& name, const std::string& dir) {
  if (fs::is_regular_file(name)) return name;
  std::vector<std::string> dirs;
  if (!dir.empty()) dirs.push_back(dir);
  if (const char* env = std::getenv("ASQCHAIN_SCENARIOS")) dirs.emplace_back(env);
  dirs.emplace_back("scenarios");
  dirs.emplace_back(ASQCHAIN_SCENARIO_DIR);
  for (const auto& d : dirs) {
    const fs::path p = fs::path(d) / (name + ".json");
    if (fs::is_regular_file(p)) return p.string();
  }
  throw asq::ValidationError("scenario '" + name + "' not found");
}

int execute(asq::ScenarioSpec spec, const Common& c) {
  if (c.seed) spec.seed = *c.seed;
  const auto fmt = asq::output_format_from_string(c.format);
  const auto result = asq::run_scenario(spec);
  const auto files = asq::write_outputs(result, spec, c.out, fmt);
  if (!c.quiet) {
    std::cout << asq::summary_document(result, spec)["results"].dump(2) << "\n";
    for (const auto& f : files) std::cerr << "wrote " << f << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Andreev spin qubit chain simulator"};
  app.require_subcommand(1);

  Common common;
  std::string selected;
  for (const auto& cmd : asq::known_commands()) {
    auto* sub = app.add_subcommand(cmd, "run the '" + cmd + "' analysis on --config");
    add_common(sub, common, true);
    sub->callback([&selected, cmd] { selected = cmd; });
  }

  auto* scen = app.add_subcommand("scenario", "shipped scenarios");
  scen->require_subcommand(1);
  std::string scen_name, scen_dir;
  auto* run = scen->add_subcommand("run", "run a named scenario");
  run->add_option("name", scen_name, "scenario name or path")->required();
  run->add_option("--scenario-dir", scen_dir, "directory holding <name>.json");
  add_common(run, common, false);
  run->callback([&] { selected = "scenario"; });

  auto* list = scen->add_subcommand("list", "list shipped scenarios");
  list->add_option("--scenario-dir", scen_dir);
  list->callback([&] { selected = "list"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (selected == "list") {
      const std::string d = scen_dir.empty() ? std::string(ASQCHAIN_SCENARIO_DIR) : scen_dir;
      std::vector<std::string> names;
      for (const auto& e : fs::directory_iterator(d))
        if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
      std::sort(names.begin(), names.end());
      for (const auto& n : names) std::cout << n << "\n";
      return kExitOk;
    }
    if (selected == "scenario") {
      if (!common.config.empty()) throw asq::ValidationError("scenario run takes a name, not --config");
      return execute(asq::load_config(find_scenario(scen_name, scen_dir)), common);
    }
    auto spec = asq::load_config(common.config);
    if (spec.command.empty())
      spec.command = selected;
    else if (spec.command != selected)
      throw asq::ValidationError("config is for '" + spec.command + "', not '" + selected + "'");
    return execute(std::move(spec), common);
  } catch (const asq::ConvergenceError& e) {
    std::cerr << "error (non-convergence): " << e.what() << "\n";
    return kExitConvergence;
  } catch (const asq::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}
