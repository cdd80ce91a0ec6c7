#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "specklewalk/medium.hpp"
#include "specklewalk/slm.hpp"

namespace specklewalk {

/// Heralded single-photon source and detection chain. Defaults reproduce a
/// 3 h acquisition with ~1.1e10 triggers at 2.5 ns coincidence window.
struct SourceConfig {
  double trigger_rate = 1.0185e6;       // 1/s
  double heralding_efficiency = 1.2e-3;  // P(heralded photon reaches the medium and is detectable)
  double collection_efficiency = 0.43;   // P(photon in target grain couples into the fiber)
  double coincidence_window = 2.5e-9;    // s
  double acquisition_time = 10800.0;     // s
  double double_pair_mean = 0.04;        // extra pairs per heralding window
  double dark_rate = 100.0;              // 1/s per detector

  /// Strict config invariants: efficiencies in (0, 1], positive window/time.
  void validate() const;
  friend bool operator==(const SourceConfig&, const SourceConfig&) = default;
};

/// Counts over one acquisition. T is the trigger, A and B the two output fibers.
struct CountRecord {
  std::uint64_t n_T = 0;
  std::uint64_t n_A = 0;
  std::uint64_t n_B = 0;
  std::uint64_t n_AT = 0;
  std::uint64_t n_BT = 0;
  std::uint64_t n_ABT = 0;

  bool consistent() const noexcept;
  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// Two-mode reduced state. p10 is the probability of the photon in mode A
/// (|10>_AB), p01 in mode B.
struct TwoModeState {
  double p00 = 1.0;
  double p01 = 0.0;
  double p10 = 0.0;
  double p11 = 0.0;
  double d_mag = 0.0;

  /// Throws InvalidProbability if the Fock-basis invariants fail.
  void validate() const;
};

struct StateEstimate {
  TwoModeState state;
  // Binomial standard errors sqrt(p (1 - p) / n_T); p00 error propagated.
  double err_p00 = 0.0;
  double err_p01 = 0.0;
  double err_p10 = 0.0;
  double err_p11 = 0.0;
  bool d_clamped = false;
};

struct ModeProbabilities {
  double q_a = 0.0;
  double q_b = 0.0;
};

/// q_X = collection * |E_out[X]|^2 / sum_m |E_out[m]|^2 for a unit-amplitude
/// input shaped by mask.
ModeProbabilities mode_probabilities(const ScatteringMatrix& s, const PhaseMask& mask,
                                     std::size_t target_a, std::size_t target_b,
                                     double collection_efficiency);

struct PortProbabilities {
  double port1 = 0.0;
  double port2 = 0.0;
};

/// Balanced lossless splitter: |a_A +- e^{i phi} a_B|^2 / 2.
PortProbabilities interfere(Complex a_a, Complex a_b, double phi);

/// interfere() averaged over Gaussian phase noise of standard deviation
/// phase_jitter on phi. The cross term shrinks by exp(-jitter^2 / 2).
PortProbabilities interfere_dephased(Complex a_a, Complex a_b, double phi, double phase_jitter);

/// Expected per-trigger detection probabilities of a count simulation.
struct CountModel {
  double expected_triggers = 0.0;
  double p_a = 0.0;   // P(A fires | trigger)
  double p_b = 0.0;
  double p_ab = 0.0;  // P(A and B fire | trigger)
};

CountModel count_model(double q_a, double q_b, const SourceConfig& cfg);

/// Draws one acquisition's worth of counts from Poisson laws with the
/// count_model means; the record invariants hold by construction.
CountRecord simulate_counts(double q_a, double q_b, const SourceConfig& cfg, std::uint64_t seed);

/// p10 = n_AT/n_T, p01 = n_BT/n_T, p11 = n_ABT/n_T, p00 the remainder;
/// d_mag clamped to sqrt(p01 p10).
StateEstimate estimate_state(const CountRecord& counts, double d_mag);

}  // namespace specklewalk
