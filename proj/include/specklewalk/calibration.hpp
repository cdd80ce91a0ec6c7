#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specklewalk/medium.hpp"

namespace specklewalk {

struct CalibrationConfig {
  int phase_steps = 4;
  /// Expected photon count of an interferogram sample at the mean intensity
  /// level. nullopt means noiseless intensities.
  std::optional<double> photons_per_measurement;
  std::uint64_t reference_seed = 0;

  void validate() const;
  friend bool operator==(const CalibrationConfig&, const CalibrationConfig&) = default;
};

/// Estimated matrix. Row m equals conj(r_m) * S_row in the noiseless limit,
/// where r_m is the static reference speckle on output m; the row factor is
/// kept because it drops out of phase conjugation.
struct SmEstimate {
  ScatteringMatrix matrix;
  std::string row_reference_note;
  std::vector<std::size_t> flagged_rows;  // rows with zero reference, zeroed
  std::vector<std::string> warnings;
};

/// The reference field: S applied to the fixed unit-amplitude mask drawn from
/// reference_seed.
ComplexField reference_field(const ScatteringMatrix& s_true, const CalibrationConfig& cfg);

/// Phase-stepping measurement of every S_mn against the reference r_m:
///   I_j = |r_m + e^{i theta_j} S_mn|^2, theta_j = 2 pi j / K
///   S_hat = (1/K) sum_j I_j e^{-i theta_j}
/// With photons set, I_j is replaced by Poisson counts (one stream per row).
SmEstimate measure_sm(const ScatteringMatrix& s_true, const CalibrationConfig& cfg);

/// Per-row |<S_hat, S>| / (|S_hat| |S|); 0 for zero-norm rows.
std::vector<double> sm_fidelity(const ScatteringMatrix& s_true, const ScatteringMatrix& estimate);

/// "row,fidelity" CSV with header.
void write_fidelity_csv(std::ostream& out, std::span<const double> fidelity);

}  // namespace specklewalk
