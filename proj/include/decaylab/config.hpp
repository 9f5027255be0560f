#pragma once

#include <filesystem>
#include <string>

#include "decaylab/measure.hpp"

namespace decaylab {

// A fully validated experiment: the measure, one command with its
// parameters, seeding, cost caps, and the output directory. Raw command
// parameters stay as JSON text and are validated by the command runner
// before any computation starts.
struct ExperimentConfig {
  SelfConformalMeasure measure;
  std::string description;
  std::string command;
  std::string params_json;  // canonical JSON of the per-command parameters
  uint64_t seed = 0;
  bool seed_given = false;
  double eps = 0.05;
  long long leaf_cap = 10'000'000;
  long long mc_cap = 10'000'000;
  std::filesystem::path out_dir = "out";
  uint64_t config_hash = 0;
};

// Parses and validates a JSON experiment file; error messages carry the
// offending field path.
ExperimentConfig parse_config(const std::string& path);

// applies command-line overrides after parsing
void override_seed(ExperimentConfig& config, uint64_t seed);
void override_out(ExperimentConfig& config, const std::string& out_dir);
void override_eps(ExperimentConfig& config, double eps);

// Executes the configured command, writing CSV (and SVG) artifacts into
// out_dir. Throws Error on failure; the CLI maps codes to exit status.
void run_experiment(const ExperimentConfig& config);

}  // namespace decaylab
