#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "specklewalk/calibration.hpp"
#include "specklewalk/medium.hpp"
#include "specklewalk/quantum.hpp"

namespace specklewalk {

enum class Scenario { Focus, Scan, Fringes, Tomo, Full };

std::string_view to_string(Scenario s) noexcept;
Scenario parse_scenario(std::string_view name);

/// Whole-run configuration. medium.seed and calibration.reference_seed are
/// not read from files; they are derived from `seed` when a run starts.
struct ExperimentConfig {
  Scenario scenario = Scenario::Full;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = ".";

  MediumConfig medium;
  CalibrationConfig calibration{4, 1.0e4, 0};
  SourceConfig source;

  std::vector<std::size_t> target_modes{100, 200};
  int n_steps = 21;
  double counts_per_step = 30.0;
  double phase_jitter = 0.70;      // rad
  double step_duration = 1.0;      // s
  std::size_t scan_halfwidth = 32; // output modes either side of the focus target
  int slm_grid = 32;               // macro-pixels per side; documentation only

  /// Sub-config invariants plus scenario-specific checks. Does not touch disk.
  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// INI-style text: [experiment], [medium], [calibration], [source], [targets].
/// Unknown sections or keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config: parse_config_text(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

}  // namespace specklewalk
