#include "specklewalk/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "specklewalk/error.hpp"
#include "specklewalk/rng.hpp"
#include "specklewalk/slm.hpp"

namespace specklewalk {

void CalibrationConfig::validate() const {
  if (phase_steps < 3) {
    throw Error(ErrorKind::InvalidConfig, "calibration: phase_steps must be >= 3");
  }
  if (photons_per_measurement &&
      !(*photons_per_measurement > 0.0 && std::isfinite(*photons_per_measurement))) {
    throw Error(ErrorKind::InvalidConfig, "calibration: photons_per_measurement must be > 0");
  }
}

ComplexField reference_field(const ScatteringMatrix& s_true, const CalibrationConfig& cfg) {
  // The reference input has its own purpose tag, independent of random_mask.
  Stream rng(cfg.reference_seed, StreamPurpose::CalibrationReference, 0);
  std::vector<double> phases(s_true.n_in());
  for (auto& p : phases) p = 2.0 * std::numbers::pi * rng.uniform();
  return propagate(s_true, apply_mask(PhaseMask(std::move(phases)), 1.0));
}

SmEstimate measure_sm(const ScatteringMatrix& s_true, const CalibrationConfig& cfg) {
  cfg.validate();
  const std::size_t steps = static_cast<std::size_t>(cfg.phase_steps);
  const std::size_t m_out = s_true.m_out();
  const std::size_t n_in = s_true.n_in();

  const ComplexField reference = reference_field(s_true, cfg);

  std::vector<Complex> shifts(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    shifts[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) /
                                    static_cast<double>(steps));
  }

  double scale = 0.0;
  if (cfg.photons_per_measurement) {
    double mean_intensity = reference.total_power() / static_cast<double>(m_out);
    double entry_power = 0.0;
    for (const auto& z : s_true.entries()) entry_power += std::norm(z);
    mean_intensity += entry_power / static_cast<double>(m_out * n_in);
    scale = *cfg.photons_per_measurement / mean_intensity;
  }

  SmEstimate result{
      ScatteringMatrix(1, 1, {Complex{}}),
      "row m is scaled by conj(r_m), the unknown static reference amplitude on output m",
      {},
      {}};

  const double norm = 1.0 / static_cast<double>(steps);
  std::vector<Complex> entries(m_out * n_in);
  for (std::size_t m = 0; m < m_out; ++m) {
    const Complex r = reference[m];
    if (r == Complex{}) {
      result.flagged_rows.push_back(m);
      result.warnings.push_back("output row " + std::to_string(m) +
                                " has zero reference amplitude; estimate zeroed");
      continue;
    }
    Stream rng(cfg.reference_seed, StreamPurpose::CalibrationNoise, m);
    const auto row = s_true.row(m);
    Complex* out = entries.data() + m * n_in;
    for (std::size_t n = 0; n < n_in; ++n) {
      Complex acc{};
      for (std::size_t j = 0; j < steps; ++j) {
        double intensity = std::norm(r + shifts[j] * row[n]);
        if (cfg.photons_per_measurement) {
          intensity = static_cast<double>(rng.poisson(scale * intensity)) / scale;
        }
        acc += intensity * std::conj(shifts[j]);
      }
      out[n] = norm * acc;
    }
  }
  ScatteringMatrix::Meta meta{{"kind", "estimate"},
                              {"phase_steps", std::to_string(cfg.phase_steps)}};
  result.matrix = ScatteringMatrix(m_out, n_in, std::move(entries), std::move(meta));
  return result;
}

std::vector<double> sm_fidelity(const ScatteringMatrix& s_true, const ScatteringMatrix& estimate) {
  if (s_true.m_out() != estimate.m_out() || s_true.n_in() != estimate.n_in()) {
    throw Error(ErrorKind::Dimension, "sm_fidelity: dimension mismatch");
  }
  std::vector<double> out(s_true.m_out());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const auto a = estimate.row(m);
    const auto b = s_true.row(m);
    Complex inner{};
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
      inner += std::conj(a[n]) * b[n];
      na += std::norm(a[n]);
      nb += std::norm(b[n]);
    }
    out[m] = (na == 0.0 || nb == 0.0)
                 ? 0.0
                 : std::min(1.0, std::abs(inner) / std::sqrt(na * nb));
  }
  return out;
}

void write_fidelity_csv(std::ostream& out, std::span<const double> fidelity) {
  out << "row,fidelity\n";
  char buf[64];
  for (std::size_t m = 0; m < fidelity.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", m, fidelity[m]);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::Io, "fidelity CSV: write failed");
}

}  // namespace specklewalk
