#include "specklewalk/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "specklewalk/error.hpp"
#include "specklewalk/rng.hpp"
#include "specklewalk/slm.hpp"

namespace specklewalk {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace

FringeScan::FringeScan(std::vector<FringePoint> points) : points_(std::move(points)) {
  if (points_.size() < 5) throw Error(ErrorKind::InvalidArgument, "fringe scan needs >= 5 points");
  for (const auto& p : points_) {
    if (!(p.phi >= 0.0 && p.phi <= two_pi)) {
      throw Error(ErrorKind::InvalidArgument, "fringe scan phase outside [0, 2pi]");
    }
    if (!(p.duration > 0.0) || !std::isfinite(p.duration)) {
      throw Error(ErrorKind::InvalidArgument, "fringe scan duration must be > 0");
    }
  }
}

FringeScan scan_fringes(const FringeSystem& system, int n_steps, double counts_per_step,
                        std::uint64_t seed) {
  if (n_steps < 5) throw Error(ErrorKind::InvalidArgument, "scan_fringes: n_steps must be >= 5");
  if (system.truth == nullptr || system.estimate == nullptr) {
    throw Error(ErrorKind::InvalidArgument, "scan_fringes: missing matrices");
  }
  const ScatteringMatrix& truth = *system.truth;
  const ScatteringMatrix& estimate = *system.estimate;
  if (truth.m_out() != estimate.m_out() || truth.n_in() != estimate.n_in()) {
    throw Error(ErrorKind::Dimension, "scan_fringes: estimate and medium differ in shape");
  }
  if (!(counts_per_step >= 0.0) || !std::isfinite(counts_per_step)) {
    throw Error(ErrorKind::InvalidArgument, "scan_fringes: counts_per_step must be >= 0");
  }
  const SourceConfig& src = system.source;
  const double accidental = src.dark_rate * src.coincidence_window;

  std::vector<double> phis(static_cast<std::size_t>(n_steps));
  std::vector<double> signal(phis.size());
  for (std::size_t j = 0; j < phis.size(); ++j) {
    phis[j] = two_pi * static_cast<double>(j) / static_cast<double>(n_steps - 1);
    const TargetSpec spec = balanced_dual_target(estimate, system.mode_a, system.mode_b, phis[j]);
    const ComplexField out = propagate(truth, apply_mask(conjugate_mask(estimate, spec), 1.0));
    const double total = out.total_power();
    if (!(total > 0.0)) throw Error(ErrorKind::DegenerateField, "scan_fringes: zero output power");
    const double scale = std::sqrt(src.collection_efficiency / total);
    const auto ports = interfere_dephased(out[system.mode_a] * scale, out[system.mode_b] * scale,
                                          0.0, system.phase_jitter);
    signal[j] = src.heralding_efficiency * ports.port1 + accidental;
  }

  double mean_signal = 0.0;
  for (double s : signal) mean_signal += s;
  mean_signal /= static_cast<double>(signal.size());

  std::vector<FringePoint> points(phis.size());
  for (std::size_t j = 0; j < phis.size(); ++j) {
    const double expected = mean_signal > 0.0 ? counts_per_step * signal[j] / mean_signal : 0.0;
    Stream rng(seed, StreamPurpose::FringeCounts, j);
    points[j] = FringePoint{phis[j], rng.poisson(expected), system.step_duration};
  }
  return FringeScan(std::move(points));
}

VisibilityFit fit_visibility(const FringeScan& scan) {
  const auto pts = scan.points();
  std::uint64_t total = 0;
  for (const auto& p : pts) total += p.counts;
  if (total == 0) throw Error(ErrorKind::Fit, "fit_visibility: no counts in scan");
  if (pts.size() < 3) throw Error(ErrorKind::Fit, "fit_visibility: fewer points than parameters");

  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixX3d design(n, 3);
  Eigen::VectorXd rate(n);
  Eigen::VectorXd duration(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& p = pts[static_cast<std::size_t>(j)];
    design(j, 0) = 1.0;
    design(j, 1) = std::cos(p.phi);
    design(j, 2) = std::sin(p.phi);
    duration(j) = p.duration;
    rate(j) = static_cast<double>(p.counts) / p.duration;
  }

  // Start from the duration-weighted Fourier projection, then reweight with
  // the Poisson variance of the current model, var(rate) = max(mu, 1) / t^2.
  Eigen::VectorXd weight = duration;
  Eigen::Vector3d coef = Eigen::Vector3d::Zero();
  Eigen::Matrix3d normal;
  for (int iter = 0; iter < 50; ++iter) {
    normal = design.transpose() * weight.asDiagonal() * design;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
    if (lu.rank() < 3) throw Error(ErrorKind::Fit, "fit_visibility: phases do not constrain the fringe");
    const Eigen::Vector3d next = lu.solve(design.transpose() * weight.asDiagonal() * rate);
    const bool converged = iter > 0 && (next - coef).norm() <= 1e-13 * next.norm();
    coef = next;
    const Eigen::VectorXd model = design * coef;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double expected_counts = std::max(model(j) * duration(j), 1.0);
      weight(j) = duration(j) * duration(j) / expected_counts;
    }
    if (converged) break;
  }
  normal = design.transpose() * weight.asDiagonal() * design;
  const Eigen::Matrix3d cov = normal.inverse();

  const double offset = coef(0);
  if (!(offset > 0.0)) throw Error(ErrorKind::Fit, "fit_visibility: non-positive mean rate");
  const double amplitude = std::hypot(coef(1), coef(2));
  const double v_raw = amplitude / offset;

  Eigen::Vector3d grad;
  if (amplitude > 0.0) {
    grad << -v_raw / offset, coef(1) / (offset * amplitude), coef(2) / (offset * amplitude);
  } else {
    grad << 0.0, std::sqrt(0.5) / offset, std::sqrt(0.5) / offset;
  }

  VisibilityFit fit;
  fit.offset = offset;
  fit.visibility = std::clamp(v_raw, 0.0, 1.0);
  fit.visibility_err = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  fit.phase0 = amplitude > 0.0 ? PhaseMask::canonical(std::atan2(coef(2), coef(1))) : 0.0;
  const Eigen::VectorXd residual = rate - design * coef;
  fit.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(n));
  return fit;
}

double coherence_from_visibility(double visibility, double p01, double p10) {
  return visibility * (p01 + p10) / 2.0;
}

bool DensityMatrix::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

std::array<double, 4> DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(entries_, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2), ev(3)};
}

DensityMatrix build_density_matrix(const TwoModeState& state, double phase_of_d) {
  state.validate();
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  rho(0, 0) = state.p00;
  rho(1, 1) = state.p01;
  rho(2, 2) = state.p10;
  rho(3, 3) = state.p11;
  const Complex d = std::polar(state.d_mag, phase_of_d);
  rho(1, 2) = d;
  rho(2, 1) = std::conj(d);
  return DensityMatrix(rho);
}

double concurrence(double p00, double p11, double d_mag) {
  return std::max(2.0 * d_mag - 2.0 * std::sqrt(p00 * p11), 0.0);
}

double poisson_cdf(std::uint64_t n, double mean) {
  if (mean <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(n) + 1.0, mean);
}

double poisson_upper_limit(std::uint64_t n_obs, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "poisson_upper_limit: confidence must lie in (0, 1)");
  }
  const double target = 1.0 - confidence;
  double lo = 0.0;
  double hi = static_cast<double>(n_obs) + 1.0;
  while (poisson_cdf(n_obs, hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (poisson_cdf(n_obs, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::int64_t concurrence_threshold(std::uint64_t n_t, double d_mag, double p00) {
  if (n_t == 0) throw Error(ErrorKind::InvalidArgument, "concurrence_threshold: n_T must be > 0");
  if (!(p00 > 0.0 && p00 <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "concurrence_threshold: p00 must lie in (0, 1]");
  }
  if (!(d_mag > 0.0)) return -1;
  const double n_total = static_cast<double>(n_t);
  auto positive = [&](std::int64_t n) {
    return concurrence(p00, static_cast<double>(n) / n_total, d_mag) > 0.0;
  };
  // ceil(x) - 1 is the answer in exact arithmetic; the walk below makes it
  // agree with concurrence() itself at the boundary.
  const double x = n_total * d_mag * d_mag / p00;
  std::int64_t n = static_cast<std::int64_t>(std::ceil(x)) - 1;
  while (positive(n + 1)) ++n;
  while (n >= 0 && !positive(n)) --n;
  return n;
}

PositivityConfidence positivity_confidence(std::uint64_t n_obs_triples, std::int64_t threshold) {
  PositivityConfidence out;
  if (threshold <= 0) return out;
  out.confidence =
      boost::math::gamma_p(static_cast<double>(n_obs_triples) + 1.0, static_cast<double>(threshold));
  out.exceeds_99 = out.confidence > 0.99;
  return out;
}

void write_fringe_csv(std::ostream& out, const FringeScan& scan) {
  out << "phi,counts,duration\n";
  char buf[96];
  for (const auto& p : scan.points()) {
    std::snprintf(buf, sizeof buf, "%.17g,%llu,%.17g\n", p.phi,
                  static_cast<unsigned long long>(p.counts), p.duration);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::Io, "fringe CSV: write failed");
}

}  // namespace specklewalk
