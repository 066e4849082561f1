#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "invsq/evolution.hpp"
#include "json.hpp"

namespace invsq {

// Initial data for the evolution-type experiments.
struct DataSpec {
  std::string profile = "bump";  // bump | ground-state | random
  double amplitude = 1.0;
  double width = 1.0;  // bump width; unused otherwise
};

// Experiment-specific knobs. Each experiment accepts only its own keys.
struct ExperimentOptions {
  std::vector<double> shifts{1.0, 2.0, 5.0, 10.0, 20.0, 50.0};  // shifted-bubble
  double q = 10.0 / 3.0;                                        // strichartz time exponent
  double T = 4.0;                                               // strichartz window, picard horizon
  int samples = 10;                                             // random data per sweep
  std::vector<double> radii{1.0, 2.0, 4.0, 8.0};                // local-smoothing
  double s = 1.0;                                               // sobolev-equiv power
  double p = 2.0;                                               // sobolev-equiv Lebesgue exponent
  int iterations = 8;                                           // picard iterations
  double sample_dt = 0.01;                                      // virial sampling
  double virial_radius = 0.0;                                   // 0: a quarter of the grid radius
  double log_step = 0.05;                                       // sharp-constant log grid step
};

struct ExperimentConfig {
  std::string experiment;
  int d = 3;
  double a = 0.0;
  double mu = 1.0;
  double R = 20.0;
  int N = 256;
  EvolutionConfig evolution;
  DataSpec data;
  ExperimentOptions options;
  std::string output = "results";
  std::uint64_t seed = 0;
  nlohmann::json source;  // the parsed document, for echoing
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<std::string> options;  // accepted keys of the "options" block
};

const std::vector<ExperimentInfo>& experiment_registry();

// Parses and validates a JSON config. Unknown keys, wrong types and out-of-range
// values raise Error(Config) naming the field; syntax errors name line and column.
ExperimentConfig parse_config(const std::string& text, bool override_admissibility = false);
ExperimentConfig load_config(const std::filesystem::path& path, bool override_admissibility = false);

// The resolved config as JSON (every field, defaults filled in) and its
// 16-hex-digit FNV-1a hash, which names the result files.
nlohmann::json resolved_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "=="
  bool pass = false;
};

struct ExperimentResult {
  std::string experiment;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Check> checks;
  std::string csv;    // series data, empty if none
  std::string error;  // set when the run threw
  bool pass() const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes <experiment>-<hash>.json (and .csv when there is series data)
// into dir via temp file + rename; returns the written paths.
std::vector<std::filesystem::path> write_results(const ExperimentConfig& cfg, const ExperimentResult& res,
                                                 const std::filesystem::path& dir);

}  // namespace invsq
