#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "specklewalk/config.hpp"

namespace specklewalk {

/// Seeds handed to each pipeline stage, all derived from ExperimentConfig::seed.
struct StageSeeds {
  std::uint64_t medium = 0;
  std::uint64_t reference = 0;
  std::uint64_t random_mask = 0;
  std::uint64_t focus_counts = 0;
  std::uint64_t fringe_counts = 0;
  std::uint64_t tomo_counts = 0;
};

StageSeeds stage_seeds(std::uint64_t master_seed);

struct RunReport {
  Scenario scenario = Scenario::Full;
  ExperimentConfig config;
  nlohmann::ordered_json result;
  double wall_time = 0.0;  // s; not written to report.json, which must replay byte-identically
  std::string software_version;
  std::vector<std::filesystem::path> files;  // everything written, in order

  /// Deterministic report document: scenario, version, config echo, result.
  nlohmann::ordered_json to_json() const;
};

// Each runner checks that config.output_dir exists before computing anything,
// then writes its artifacts plus report.json and config.ini into it.
RunReport run_focus(const ExperimentConfig& config);
RunReport run_scan(const ExperimentConfig& config);
RunReport run_fringes(const ExperimentConfig& config);
RunReport run_tomo(const ExperimentConfig& config);
RunReport run_full(const ExperimentConfig& config);

/// Dispatches on config.scenario.
RunReport run_scenario(const ExperimentConfig& config);

}  // namespace specklewalk
