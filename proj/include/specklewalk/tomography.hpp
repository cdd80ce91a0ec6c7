#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "specklewalk/medium.hpp"
#include "specklewalk/quantum.hpp"

namespace specklewalk {

struct FringePoint {
  double phi = 0.0;          // rad
  std::uint64_t counts = 0;
  double duration = 1.0;     // s
};

/// At least 5 points, phases within [0, 2pi], positive durations.
class FringeScan {
 public:
  explicit FringeScan(std::vector<FringePoint> points);
  std::span<const FringePoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<FringePoint> points_;
};

struct VisibilityFit {
  double visibility = 0.0;  // clamped to [0, 1]
  double visibility_err = 0.0;
  double offset = 0.0;      // mean rate, counts/s
  double phase0 = 0.0;      // [0, 2pi)
  double residual_rms = 0.0;
};

/// Everything scan_fringes needs to emulate the interferometer: the true
/// medium that photons traverse, the estimate masks are computed from, and
/// the detection chain.
struct FringeSystem {
  const ScatteringMatrix* truth = nullptr;
  const ScatteringMatrix* estimate = nullptr;
  std::size_t mode_a = 0;
  std::size_t mode_b = 1;
  SourceConfig source;
  double phase_jitter = 0.0;    // rad, Gaussian dephasing on the relative phase
  double step_duration = 1.0;   // s, recorded per point
};

/// Steps the relative phase phi_j = 2 pi j / (n_steps - 1) through balanced
/// dual-target masks and samples Poisson counts at splitter port 1. The mean
/// expected count over the scan equals counts_per_step.
FringeScan scan_fringes(const FringeSystem& system, int n_steps, double counts_per_step,
                        std::uint64_t seed);

/// Poisson-weighted least squares for rate(phi) = offset (1 + V cos(phi - phase0)),
/// solved in the linear basis (1, cos, sin) and iterated on model weights.
VisibilityFit fit_visibility(const FringeScan& scan);

/// |d| ~ V (p01 + p10) / 2.
double coherence_from_visibility(double visibility, double p01, double p10);

/// 4x4 state in the (|00>, |01>, |10>, |11>) basis.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Eigen::Matrix4cd& entries) : entries_(entries) {}

  const Eigen::Matrix4cd& entries() const noexcept { return entries_; }
  Complex trace() const { return entries_.trace(); }
  bool is_hermitian(double tol) const;
  /// Ascending.
  std::array<double, 4> eigenvalues() const;

 private:
  Eigen::Matrix4cd entries_;
};

DensityMatrix build_density_matrix(const TwoModeState& state, double phase_of_d = 0.0);

/// max(2|d| - 2 sqrt(p00 p11), 0).
double concurrence(double p00, double p11, double d_mag);

/// P(Poisson(mean) <= n).
double poisson_cdf(std::uint64_t n, double mean);

/// Smallest mean with P(Poisson(mean) <= n_obs) = 1 - confidence (bisection).
double poisson_upper_limit(std::uint64_t n_obs, double confidence);

/// Largest N with concurrence(p00, N / n_T, d_mag) > 0; -1 when none exists.
std::int64_t concurrence_threshold(std::uint64_t n_t, double d_mag, double p00);

struct PositivityConfidence {
  double confidence = 0.0;  // P(Poisson(threshold) > n_obs)
  bool exceeds_99 = false;
};

PositivityConfidence positivity_confidence(std::uint64_t n_obs_triples, std::int64_t threshold);

/// "phi,counts,duration" CSV with header.
void write_fringe_csv(std::ostream& out, const FringeScan& scan);

}  // namespace specklewalk
