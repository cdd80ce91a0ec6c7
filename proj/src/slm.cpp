#include "specklewalk/slm.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <string>

#include "specklewalk/error.hpp"
#include "specklewalk/rng.hpp"

namespace specklewalk {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double row_norm(const ScatteringMatrix& s, std::size_t m) {
  double sum = 0.0;
  for (const auto& z : s.row(m)) sum += std::norm(z);
  return std::sqrt(sum);
}
}  // namespace

double PhaseMask::canonical(double phase) {
  if (!std::isfinite(phase)) throw Error(ErrorKind::InvalidArgument, "phase is not finite");
  double r = std::fmod(phase, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

PhaseMask::PhaseMask(std::vector<double> phases) : phases_(std::move(phases)) {
  for (auto& p : phases_) p = canonical(p);
}

TargetSpec::TargetSpec(std::vector<Target> targets) : targets_(std::move(targets)) {
  if (targets_.empty()) throw Error(ErrorKind::InvalidArgument, "target spec is empty");
  std::set<std::size_t> seen;
  bool any_nonzero = false;
  for (const auto& t : targets_) {
    if (!seen.insert(t.mode).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate target mode " + std::to_string(t.mode));
    }
    if (!std::isfinite(t.weight.real()) || !std::isfinite(t.weight.imag())) {
      throw Error(ErrorKind::InvalidArgument, "target weight is not finite");
    }
    any_nonzero = any_nonzero || t.weight != Complex{};
  }
  if (!any_nonzero) throw Error(ErrorKind::InvalidArgument, "all target weights are zero");
}

void TargetSpec::check_against(std::size_t m_out) const {
  for (const auto& t : targets_) {
    if (t.mode >= m_out) {
      throw Error(ErrorKind::Dimension, "target mode " + std::to_string(t.mode) +
                                            " outside [0, " + std::to_string(m_out) + ")");
    }
  }
}

TargetSpec single_target(std::size_t mode) { return TargetSpec({Target{mode, {1.0, 0.0}}}); }

TargetSpec balanced_dual_target(const ScatteringMatrix& s, std::size_t mode_a,
                                std::size_t mode_b, double relative_phase) {
  TargetSpec probe({Target{mode_a, 1.0}, Target{mode_b, 1.0}});
  probe.check_against(s.m_out());
  const double norm_a = row_norm(s, mode_a);
  const double norm_b = row_norm(s, mode_b);
  if (norm_a == 0.0 || norm_b == 0.0) {
    throw Error(ErrorKind::DegenerateTarget, "dual target: a target row is all zero");
  }
  return TargetSpec({Target{mode_a, Complex(1.0 / norm_a, 0.0)},
                     Target{mode_b, std::polar(1.0 / norm_b, relative_phase)}});
}

PhaseMask random_mask(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "random_mask: n must be >= 1");
  Stream rng(seed, StreamPurpose::RandomMask, 0);
  std::vector<double> phases(n);
  for (auto& p : phases) p = two_pi * rng.uniform();
  return PhaseMask(std::move(phases));
}

PhaseMask conjugate_mask(const ScatteringMatrix& s, const TargetSpec& spec) {
  spec.check_against(s.m_out());
  for (const auto& t : spec.targets()) {
    if (t.weight != Complex{} && row_norm(s, t.mode) == 0.0) {
      throw Error(ErrorKind::DegenerateTarget,
                  "target row " + std::to_string(t.mode) + " is all zero");
    }
  }
  std::vector<Complex> sum(s.n_in());
  for (const auto& t : spec.targets()) {
    const Complex w = std::conj(t.weight);
    const auto row = s.row(t.mode);
    for (std::size_t n = 0; n < row.size(); ++n) sum[n] += w * std::conj(row[n]);
  }
  std::vector<double> phases(s.n_in());
  for (std::size_t n = 0; n < phases.size(); ++n) phases[n] = std::arg(sum[n]);
  return PhaseMask(std::move(phases));
}

ComplexField apply_mask(const PhaseMask& mask, double amplitude) {
  std::vector<Complex> field(mask.size());
  for (std::size_t n = 0; n < mask.size(); ++n) field[n] = std::polar(amplitude, mask[n]);
  return ComplexField(std::move(field));
}

double enhancement(const ScatteringMatrix& s, const PhaseMask& mask, std::size_t target) {
  if (s.m_out() < 2) {
    throw Error(ErrorKind::Statistics, "enhancement: need at least 2 output modes for a background");
  }
  if (target >= s.m_out()) throw Error(ErrorKind::Dimension, "enhancement: target out of range");
  const auto intensities = propagate(s, apply_mask(mask, 1.0)).intensities();
  double background = 0.0;
  for (std::size_t m = 0; m < intensities.size(); ++m) {
    if (m != target) background += intensities[m];
  }
  background /= static_cast<double>(intensities.size() - 1);
  if (!(background > 0.0)) throw Error(ErrorKind::Statistics, "enhancement: zero background");
  return intensities[target] / background;
}

void write_mask_csv(std::ostream& out, const PhaseMask& mask) {
  char buf[64];
  for (double p : mask.phases()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", p);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::Io, "mask CSV: write failed");
}

PhaseMask read_mask_csv(std::istream& in) {
  std::vector<double> phases;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size()) {
      throw Error(ErrorKind::Format, "mask CSV: bad value on line " + std::to_string(line_no));
    }
    phases.push_back(value);
  }
  if (phases.empty()) throw Error(ErrorKind::Format, "mask CSV: no phases");
  return PhaseMask(std::move(phases));
}

}  // namespace specklewalk
