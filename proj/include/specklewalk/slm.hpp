#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "specklewalk/medium.hpp"

namespace specklewalk {

/// Phase-only SLM state: one phase per controlled input mode, kept in [0, 2pi).
class PhaseMask {
 public:
  PhaseMask() = default;
  explicit PhaseMask(std::vector<double> phases);

  std::size_t size() const noexcept { return phases_.size(); }
  double operator[](std::size_t i) const { return phases_[i]; }
  std::span<const double> phases() const noexcept { return phases_; }

  /// Maps any finite angle into [0, 2pi). Idempotent.
  static double canonical(double phase);

  friend bool operator==(const PhaseMask&, const PhaseMask&) = default;

 private:
  std::vector<double> phases_;
};

struct Target {
  std::size_t mode = 0;
  Complex weight{1.0, 0.0};
};

/// Output modes to focus on, each with a complex weight. For two targets the
/// relative output phase is set through the weight ratio.
class TargetSpec {
 public:
  explicit TargetSpec(std::vector<Target> targets);

  std::span<const Target> targets() const noexcept { return targets_; }
  std::size_t size() const noexcept { return targets_.size(); }

  /// Throws Dimension if any index is outside [0, m_out).
  void check_against(std::size_t m_out) const;

 private:
  std::vector<Target> targets_;
};

TargetSpec single_target(std::size_t mode);

/// Two targets with weights 1/|S_a| and e^{i phi}/|S_b| (inverse row norms),
/// so that both outputs carry about the same amplitude.
TargetSpec balanced_dual_target(const ScatteringMatrix& s, std::size_t mode_a,
                                std::size_t mode_b, double relative_phase);

PhaseMask random_mask(std::size_t n, std::uint64_t seed);

/// phases[n] = arg( sum_k conj(w_k) * conj(S[t_k, n]) ).
/// For one target every term S[t,n] e^{i phases[n]} is real and nonnegative.
/// The field reaching target k is proportional to conj(w_k), so a weight pair
/// (1, e^{i phi}) yields arg(E_a) - arg(E_b) = phi.
PhaseMask conjugate_mask(const ScatteringMatrix& s, const TargetSpec& spec);

ComplexField apply_mask(const PhaseMask& mask, double amplitude);

/// Target intensity over the mean intensity of all other output modes.
double enhancement(const ScatteringMatrix& s, const PhaseMask& mask, std::size_t target);

// One phase per line, radians, 17 significant digits.
void write_mask_csv(std::ostream& out, const PhaseMask& mask);
PhaseMask read_mask_csv(std::istream& in);

}  // namespace specklewalk
