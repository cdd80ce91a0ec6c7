#include "specklewalk/quantum.hpp"

#include <algorithm>
#include <cmath>

#include "specklewalk/error.hpp"
#include "specklewalk/rng.hpp"

namespace specklewalk {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }
bool nonneg(double x) { return x >= 0.0 && std::isfinite(x); }

// Range check used by the count simulation. Zero efficiencies are accepted
// here as a limiting case; config files go through SourceConfig::validate.
void check_physical(const SourceConfig& c) {
  if (!nonneg(c.trigger_rate) || !nonneg(c.dark_rate) || !nonneg(c.double_pair_mean)) {
    throw Error(ErrorKind::InvalidConfig, "source: rates must be finite and >= 0");
  }
  if (!in_unit(c.heralding_efficiency) || !in_unit(c.collection_efficiency)) {
    throw Error(ErrorKind::InvalidConfig, "source: efficiencies must lie in [0, 1]");
  }
  if (!(c.coincidence_window > 0.0) || !(c.acquisition_time > 0.0) ||
      !std::isfinite(c.coincidence_window) || !std::isfinite(c.acquisition_time)) {
    throw Error(ErrorKind::InvalidConfig, "source: window and acquisition time must be > 0");
  }
}

}  // namespace

void SourceConfig::validate() const {
  check_physical(*this);
  if (!(heralding_efficiency > 0.0) || !(collection_efficiency > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "source: efficiencies must lie in (0, 1]");
  }
}

bool CountRecord::consistent() const noexcept {
  return n_ABT <= std::min(n_AT, n_BT) && n_AT <= std::min(n_A, n_T) &&
         n_BT <= std::min(n_B, n_T);
}

void TwoModeState::validate() const {
  for (double p : {p00, p01, p10, p11}) {
    if (!in_unit(p)) throw Error(ErrorKind::InvalidProbability, "state: probability outside [0, 1]");
  }
  if (std::fabs(p00 + p01 + p10 + p11 - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidProbability, "state: probabilities do not sum to 1");
  }
  if (!(d_mag >= 0.0) || d_mag > std::sqrt(p01 * p10) + 1e-12) {
    throw Error(ErrorKind::PsdViolation, "state: |d| exceeds sqrt(p01 p10)");
  }
}

ModeProbabilities mode_probabilities(const ScatteringMatrix& s, const PhaseMask& mask,
                                     std::size_t target_a, std::size_t target_b,
                                     double collection_efficiency) {
  if (target_a >= s.m_out() || target_b >= s.m_out()) {
    throw Error(ErrorKind::Dimension, "mode_probabilities: target out of range");
  }
  if (mask.size() != s.n_in()) {
    throw Error(ErrorKind::Dimension, "mode_probabilities: mask length != n_in");
  }
  if (!in_unit(collection_efficiency)) {
    throw Error(ErrorKind::InvalidArgument, "mode_probabilities: collection efficiency outside [0, 1]");
  }
  const ComplexField out = propagate(s, apply_mask(mask, 1.0));
  const double total = out.total_power();
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateField, "mode_probabilities: zero output power");
  return {collection_efficiency * std::norm(out[target_a]) / total,
          collection_efficiency * std::norm(out[target_b]) / total};
}

PortProbabilities interfere(Complex a_a, Complex a_b, double phi) {
  const Complex shifted = std::polar(1.0, phi) * a_b;
  return {std::norm(a_a + shifted) / 2.0, std::norm(a_a - shifted) / 2.0};
}

PortProbabilities interfere_dephased(Complex a_a, Complex a_b, double phi, double phase_jitter) {
  const double mean = (std::norm(a_a) + std::norm(a_b)) / 2.0;
  const double cross = std::real(a_a * std::conj(std::polar(1.0, phi) * a_b)) *
                       std::exp(-phase_jitter * phase_jitter / 2.0);
  return {mean + cross, mean - cross};
}

CountModel count_model(double q_a, double q_b, const SourceConfig& cfg) {
  check_physical(cfg);
  if (!in_unit(q_a) || !in_unit(q_b) || q_a + q_b > 1.0) {
    throw Error(ErrorKind::InvalidProbability, "simulate_counts: need q_A, q_B >= 0 and q_A + q_B <= 1");
  }
  const double eta = cfg.heralding_efficiency;
  const double accidental = cfg.dark_rate * cfg.coincidence_window;
  CountModel m;
  m.expected_triggers = cfg.trigger_rate * cfg.acquisition_time;
  m.p_a = std::min(1.0, eta * q_a + accidental);
  m.p_b = std::min(1.0, eta * q_b + accidental);
  // Genuine A&B only from a second pair in the window; the rest is dark-count
  // coincidences with either a photon or another dark count.
  m.p_ab = cfg.double_pair_mean * eta * eta * q_a * q_b +
           accidental * eta * (q_a + q_b) + accidental * accidental;
  m.p_ab = std::min({m.p_ab, m.p_a, m.p_b});
  return m;
}

CountRecord simulate_counts(double q_a, double q_b, const SourceConfig& cfg, std::uint64_t seed) {
  const CountModel model = count_model(q_a, q_b, cfg);
  Stream rng(seed, StreamPurpose::Counts, 0);
  CountRecord r;
  r.n_T = rng.poisson(model.expected_triggers);
  const double n_t = static_cast<double>(r.n_T);
  r.n_ABT = std::min(r.n_T, rng.poisson(n_t * model.p_ab));
  r.n_AT = std::min(r.n_T, r.n_ABT + rng.poisson(n_t * (model.p_a - model.p_ab)));
  r.n_BT = std::min(r.n_T, r.n_ABT + rng.poisson(n_t * (model.p_b - model.p_ab)));
  const double untriggered = cfg.dark_rate * cfg.acquisition_time;
  r.n_A = r.n_AT + rng.poisson(untriggered);
  r.n_B = r.n_BT + rng.poisson(untriggered);
  return r;
}

StateEstimate estimate_state(const CountRecord& counts, double d_mag) {
  if (counts.n_T == 0) throw Error(ErrorKind::Estimation, "estimate_state: no triggers recorded");
  if (!counts.consistent()) throw Error(ErrorKind::Estimation, "estimate_state: inconsistent count record");
  if (!(d_mag >= 0.0) || !std::isfinite(d_mag)) {
    throw Error(ErrorKind::InvalidArgument, "estimate_state: |d| must be finite and >= 0");
  }
  const double n_t = static_cast<double>(counts.n_T);
  StateEstimate e;
  auto& s = e.state;
  s.p10 = static_cast<double>(counts.n_AT) / n_t;
  s.p01 = static_cast<double>(counts.n_BT) / n_t;
  s.p11 = static_cast<double>(counts.n_ABT) / n_t;
  s.p00 = 1.0 - s.p01 - s.p10 - s.p11;
  if (s.p00 < 0.0) {
    throw Error(ErrorKind::Estimation, "estimate_state: detection probabilities exceed 1");
  }
  const double bound = std::sqrt(s.p01 * s.p10);
  e.d_clamped = d_mag > bound;
  s.d_mag = std::min(d_mag, bound);

  auto binomial = [n_t](double p) { return std::sqrt(p * (1.0 - p) / n_t); };
  e.err_p01 = binomial(s.p01);
  e.err_p10 = binomial(s.p10);
  e.err_p11 = binomial(s.p11);
  e.err_p00 = std::sqrt(e.err_p01 * e.err_p01 + e.err_p10 * e.err_p10 + e.err_p11 * e.err_p11);
  return e;
}

}  // namespace specklewalk
