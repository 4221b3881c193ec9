#pragma once

// Scenario drivers behind the CLI: each produces CSV bodies (deterministic
// for a given config and seed) plus JSON sidecars carrying the resolved
// config, seed, version and wall clock.

#include "gkp/config.hpp"
#include "gkp/fit.hpp"

namespace gkp {

struct CsvFile {
  std::string name;  // without extension
  std::string body;
};

std::vector<CsvFile> scenario_epsilon_sweep(const ScenarioConfig& cfg);
std::vector<CsvFile> scenario_stabilizer_onset(const ScenarioConfig& cfg);
std::vector<CsvFile> scenario_lifetimes(const ScenarioConfig& cfg);
std::vector<CsvFile> scenario_logical_init(const ScenarioConfig& cfg);
std::vector<CsvFile> scenario_charfn(const ScenarioConfig& cfg);

std::vector<CsvFile> run_scenario(const ScenarioConfig& cfg);

// Writes <prefix><name>.csv plus a .json sidecar per file; returns the paths.
std::vector<std::string> write_outputs(const ScenarioConfig& cfg,
                                       const std::vector<CsvFile>& files);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace gkp
