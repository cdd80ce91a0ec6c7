#include "specklewalk/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "specklewalk/calibration.hpp"
#include "specklewalk/error.hpp"
#include "specklewalk/medium.hpp"
#include "specklewalk/quantum.hpp"
#include "specklewalk/rng.hpp"
#include "specklewalk/slm.hpp"
#include "specklewalk/tomography.hpp"

namespace specklewalk {

namespace {

using json = nlohmann::ordered_json;

// Purpose tags for stage seeds; kept apart from the in-module StreamPurpose
// values so a stage seed never coincides with a module stream seed.
enum class Stage : std::uint64_t {
  Medium = 101,
  Reference = 102,
  RandomMask = 103,
  FocusCounts = 104,
  FringeCounts = 105,
  TomoCounts = 106,
};

std::uint64_t stage(std::uint64_t master, Stage s) {
  return derive_seed(master, static_cast<std::uint64_t>(s), 0);
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::vector<std::filesystem::path> take() { return std::move(files_); }

  void text(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
    files_.push_back(path);
  }

  void json_file(const std::string& name, const json& doc) { text(name, doc.dump(2) + "\n"); }

  void smx1(const std::string& name, const ScatteringMatrix& s) {
    const auto path = dir_ / name;
    save_smx1(path, s);
    files_.push_back(path);
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

void require_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::Io, "output directory does not exist: " + dir.string());
  }
}

ExperimentConfig prepare(const ExperimentConfig& config, Scenario scenario) {
  ExperimentConfig c = config;
  c.scenario = scenario;
  c.validate();
  require_output_dir(c.output_dir);
  return c;
}

struct Pipeline {
  ScatteringMatrix truth;
  SmEstimate estimate;
};

Pipeline build_pipeline(const ExperimentConfig& c, const StageSeeds& seeds) {
  MediumConfig medium = c.medium;
  medium.seed = seeds.medium;
  CalibrationConfig calibration = c.calibration;
  calibration.reference_seed = seeds.reference;
  ScatteringMatrix truth = generate_medium(medium);
  SmEstimate estimate = measure_sm(truth, calibration);
  return {std::move(truth), std::move(estimate)};
}

json source_json(const SourceConfig& s) {
  return json{{"trigger_rate", s.trigger_rate},
              {"heralding_efficiency", s.heralding_efficiency},
              {"collection_efficiency", s.collection_efficiency},
              {"coincidence_window", s.coincidence_window},
              {"acquisition_time", s.acquisition_time},
              {"double_pair_mean", s.double_pair_mean},
              {"dark_rate", s.dark_rate}};
}

json calibration_section(const ExperimentConfig& c, const Pipeline& p, ArtifactWriter& out) {
  const auto fidelity = sm_fidelity(p.truth, p.estimate.matrix);
  out.smx1("estimate.smx1", p.estimate.matrix);
  std::ostringstream csv;
  write_fidelity_csv(csv, fidelity);
  out.text("fidelity.csv", csv.str());

  double mean = 0.0;
  double lowest = 1.0;
  for (double f : fidelity) {
    mean += f;
    lowest = std::min(lowest, f);
  }
  mean /= static_cast<double>(fidelity.size());
  json flagged = json::array();
  for (auto m : p.estimate.flagged_rows) flagged.push_back(m);
  return json{{"n_in", c.medium.n_in},
              {"m_out", c.medium.m_out},
              {"phase_steps", c.calibration.phase_steps},
              {"noiseless", !c.calibration.photons_per_measurement.has_value()},
              {"mean_row_fidelity", mean},
              {"min_row_fidelity", lowest},
              {"flagged_rows", flagged},
              {"warnings", p.estimate.warnings},
              {"row_reference_note", p.estimate.row_reference_note}};
}

struct FocusProfile {
  json summary;
  std::string csv;
};

FocusProfile focus_profile(const ExperimentConfig& c, const Pipeline& p, const PhaseMask& mask,
                           std::size_t target, std::uint64_t seed, std::uint64_t stream_base) {
  const ComplexField out = propagate(p.truth, apply_mask(mask, 1.0));
  const double total = out.total_power();
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateField, "focus: zero output power");
  const SourceConfig& src = c.source;
  const std::size_t m_out = p.truth.m_out();

  Stream trigger_rng(seed, StreamPurpose::ScanCounts, stream_base);
  const std::uint64_t n_t = trigger_rng.poisson(src.trigger_rate * src.acquisition_time);
  const double delivered = static_cast<double>(n_t) * src.heralding_efficiency;

  const std::size_t lo = target > c.scan_halfwidth ? target - c.scan_halfwidth : 0;
  const std::size_t hi = std::min(m_out - 1, target + c.scan_halfwidth);
  std::ostringstream csv;
  csv << "mode,coincidences\n";
  std::uint64_t target_counts = 0;
  for (std::size_t m = lo; m <= hi; ++m) {
    const double q = src.collection_efficiency * std::norm(out[m]) / total;
    Stream rng(seed, StreamPurpose::ScanCounts, stream_base + 1 + m);
    const std::uint64_t counts = rng.poisson(delivered * q);
    if (m == target) target_counts = counts;
    csv << m << ',' << counts << '\n';
  }

  const double fraction = src.collection_efficiency * std::norm(out[target]) / total;
  json summary{{"focused_fraction", fraction},
               {"measured_fraction",
                delivered > 0.0 ? json(static_cast<double>(target_counts) / delivered) : json()},
               {"target_coincidences", target_counts},
               {"triggers", n_t},
               {"enhancement", m_out >= 2 ? json(enhancement(p.truth, mask, target)) : json()}};
  return {std::move(summary), csv.str()};
}

json focus_section(const ExperimentConfig& c, const StageSeeds& seeds, const Pipeline& p,
                   ArtifactWriter& out) {
  const std::size_t target = c.target_modes.front();
  const PhaseMask conj = conjugate_mask(p.estimate.matrix, single_target(target));
  const PhaseMask rnd = random_mask(c.medium.n_in, seeds.random_mask);
  const std::uint64_t stride = c.medium.m_out + 1;
  auto focused = focus_profile(c, p, conj, target, seeds.focus_counts, 0);
  auto baseline = focus_profile(c, p, rnd, target, seeds.focus_counts, stride);

  std::ostringstream mask_csv;
  write_mask_csv(mask_csv, conj);
  out.text("focus_mask.csv", mask_csv.str());
  mask_csv.str("");
  write_mask_csv(mask_csv, rnd);
  out.text("random_mask.csv", mask_csv.str());
  out.text("focus_scan_conjugate.csv", focused.csv);
  out.text("focus_scan_random.csv", baseline.csv);

  return json{{"target", target},
              {"slm_grid", c.slm_grid},
              {"scan_window", {target > c.scan_halfwidth ? target - c.scan_halfwidth : 0,
                               std::min(c.medium.m_out - 1, target + c.scan_halfwidth)}},
              {"conjugate", std::move(focused.summary)},
              {"random", std::move(baseline.summary)}};
}

struct FringeOutcome {
  json section;
  VisibilityFit fit;
};

FringeOutcome fringes_section(const ExperimentConfig& c, const StageSeeds& seeds, const Pipeline& p,
                              ArtifactWriter& out) {
  FringeSystem system{&p.truth, &p.estimate.matrix, c.target_modes[0], c.target_modes[1],
                      c.source, c.phase_jitter, c.step_duration};
  const FringeScan scan = scan_fringes(system, c.n_steps, c.counts_per_step, seeds.fringe_counts);
  std::ostringstream csv;
  write_fringe_csv(csv, scan);
  out.text("fringes.csv", csv.str());
  const VisibilityFit fit = fit_visibility(scan);
  std::uint64_t total = 0;
  for (const auto& pt : scan.points()) total += pt.counts;
  json section{{"n_steps", c.n_steps},
               {"total_counts", total},
               {"visibility", fit.visibility},
               {"visibility_err", fit.visibility_err},
               {"offset", fit.offset},
               {"phase0", fit.phase0},
               {"residual_rms", fit.residual_rms}};
  out.json_file("visibility.json", section);
  return {std::move(section), fit};
}

json tomo_section(const ExperimentConfig& c, const StageSeeds& seeds, const Pipeline& p,
                  const VisibilityFit& fit, ArtifactWriter& out) {
  const std::size_t a = c.target_modes[0];
  const std::size_t b = c.target_modes[1];
  const PhaseMask mask = conjugate_mask(p.estimate.matrix, balanced_dual_target(p.estimate.matrix, a, b, 0.0));
  const ModeProbabilities q = mode_probabilities(p.truth, mask, a, b, c.source.collection_efficiency);
  const CountRecord counts = simulate_counts(q.q_a, q.q_b, c.source, seeds.tomo_counts);

  json counts_doc{{"n_T", counts.n_T},   {"n_A", counts.n_A},   {"n_B", counts.n_B},
                  {"n_AT", counts.n_AT}, {"n_BT", counts.n_BT}, {"n_ABT", counts.n_ABT},
                  {"q_A", q.q_a},        {"q_B", q.q_b},        {"config", source_json(c.source)}};
  out.json_file("counts.json", counts_doc);

  const StateEstimate raw = estimate_state(counts, 0.0);
  const double d = coherence_from_visibility(fit.visibility, raw.state.p01, raw.state.p10);
  const StateEstimate est = estimate_state(counts, d);
  const TwoModeState& s = est.state;
  const double d_err = std::hypot((s.p01 + s.p10) / 2.0 * fit.visibility_err,
                                  fit.visibility / 2.0 * std::hypot(est.err_p01, est.err_p10));

  const DensityMatrix rho = build_density_matrix(s);
  const double c_value = concurrence(s.p00, s.p11, s.d_mag);
  double c_err2 = 4.0 * d_err * d_err;
  if (s.p11 > 0.0) {
    c_err2 += s.p00 / s.p11 * est.err_p11 * est.err_p11 + s.p11 / s.p00 * est.err_p00 * est.err_p00;
  }
  const std::int64_t threshold = concurrence_threshold(counts.n_T, s.d_mag, s.p00);
  const PositivityConfidence confidence = positivity_confidence(counts.n_ABT, threshold);

  std::ostringstream csv;
  csv.precision(17);
  csv << "quantity,value,std_error\n"
      << "p00," << s.p00 << ',' << est.err_p00 << '\n'
      << "p01," << s.p01 << ',' << est.err_p01 << '\n'
      << "p10," << s.p10 << ',' << est.err_p10 << '\n'
      << "p11," << s.p11 << ',' << est.err_p11 << '\n'
      << "d_mag," << s.d_mag << ',' << d_err << '\n'
      << "visibility," << fit.visibility << ',' << fit.visibility_err << '\n'
      << "concurrence," << c_value << ',' << std::sqrt(c_err2) << '\n';
  out.text("probabilities.csv", csv.str());

  json re = json::array();
  json im = json::array();
  for (int i = 0; i < 4; ++i) {
    json row_re = json::array();
    json row_im = json::array();
    for (int j = 0; j < 4; ++j) {
      row_re.push_back(rho.entries()(i, j).real());
      row_im.push_back(rho.entries()(i, j).imag());
    }
    re.push_back(row_re);
    im.push_back(row_im);
  }
  const auto ev = rho.eigenvalues();

  json section{
      {"counts", {{"n_T", counts.n_T}, {"n_AT", counts.n_AT}, {"n_BT", counts.n_BT}, {"n_ABT", counts.n_ABT}}},
      {"probabilities",
       {{"p00", {{"value", s.p00}, {"err", est.err_p00}}},
        {"p01", {{"value", s.p01}, {"err", est.err_p01}}},
        {"p10", {{"value", s.p10}, {"err", est.err_p10}}},
        {"p11", {{"value", s.p11}, {"err", est.err_p11}}}}},
      {"visibility", {{"value", fit.visibility}, {"err", fit.visibility_err}}},
      {"d_mag", {{"value", s.d_mag}, {"err", d_err}, {"clamped", est.d_clamped}}},
      {"concurrence", {{"value", c_value}, {"err", std::sqrt(c_err2)}}},
      {"threshold_n0", threshold},
      {"confidence", confidence.confidence},
      {"confidence_exceeds_99", confidence.exceeds_99},
      {"entangled", c_value > 0.0 && confidence.exceeds_99},
      {"density_matrix", {{"basis", {"00", "01", "10", "11"}}, {"real", re}, {"imag", im}}},
      {"eigenvalues", {ev[0], ev[1], ev[2], ev[3]}}};
  out.json_file("tomography.json", section);
  return section;
}

RunReport finish(RunReport report, ArtifactWriter& out) {
  out.text("config.ini", emit_config(report.config));
  out.json_file("report.json", report.to_json());
  report.files = out.take();
  return report;
}

RunReport start(const ExperimentConfig& c) {
  RunReport r;
  r.scenario = c.scenario;
  r.config = c;
  r.software_version = SPECKLEWALK_VERSION;
  return r;
}

}  // namespace

StageSeeds stage_seeds(std::uint64_t master) {
  return {stage(master, Stage::Medium),      stage(master, Stage::Reference),
          stage(master, Stage::RandomMask),  stage(master, Stage::FocusCounts),
          stage(master, Stage::FringeCounts), stage(master, Stage::TomoCounts)};
}

nlohmann::ordered_json RunReport::to_json() const {
  return json{{"scenario", to_string(scenario)},
              {"software_version", software_version},
              {"seed", config.seed},
              {"config", emit_config(config)},
              {"result", result}};
}

RunReport run_focus(const ExperimentConfig& config) {
  RunReport report = start(prepare(config, Scenario::Focus));
  const auto& c = report.config;
  ArtifactWriter out(c.output_dir);
  const StageSeeds seeds = stage_seeds(c.seed);
  const Pipeline p = build_pipeline(c, seeds);
  report.result = json{{"focus", focus_section(c, seeds, p, out)}};
  return finish(std::move(report), out);
}

RunReport run_scan(const ExperimentConfig& config) {
  RunReport report = start(prepare(config, Scenario::Scan));
  const auto& c = report.config;
  ArtifactWriter out(c.output_dir);
  const Pipeline p = build_pipeline(c, stage_seeds(c.seed));
  report.result = json{{"calibration", calibration_section(c, p, out)}};
  return finish(std::move(report), out);
}

RunReport run_fringes(const ExperimentConfig& config) {
  RunReport report = start(prepare(config, Scenario::Fringes));
  const auto& c = report.config;
  ArtifactWriter out(c.output_dir);
  const StageSeeds seeds = stage_seeds(c.seed);
  const Pipeline p = build_pipeline(c, seeds);
  report.result = json{{"fringes", fringes_section(c, seeds, p, out).section}};
  return finish(std::move(report), out);
}

RunReport run_tomo(const ExperimentConfig& config) {
  RunReport report = start(prepare(config, Scenario::Tomo));
  const auto& c = report.config;
  ArtifactWriter out(c.output_dir);
  const StageSeeds seeds = stage_seeds(c.seed);
  const Pipeline p = build_pipeline(c, seeds);
  auto fringes = fringes_section(c, seeds, p, out);
  json tomo = tomo_section(c, seeds, p, fringes.fit, out);
  report.result = json{{"fringes", std::move(fringes.section)}, {"tomography", std::move(tomo)}};
  return finish(std::move(report), out);
}

RunReport run_full(const ExperimentConfig& config) {
  RunReport report = start(prepare(config, Scenario::Full));
  const auto& c = report.config;
  ArtifactWriter out(c.output_dir);
  const StageSeeds seeds = stage_seeds(c.seed);
  const Pipeline p = build_pipeline(c, seeds);
  json calibration = calibration_section(c, p, out);
  json focus = focus_section(c, seeds, p, out);
  auto fringes = fringes_section(c, seeds, p, out);
  json tomo = tomo_section(c, seeds, p, fringes.fit, out);
  report.result = json{{"calibration", std::move(calibration)},
                       {"focus", std::move(focus)},
                       {"fringes", std::move(fringes.section)},
                       {"tomography", std::move(tomo)}};
  return finish(std::move(report), out);
}

RunReport run_scenario(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  switch (config.scenario) {
    case Scenario::Focus: report = run_focus(config); break;
    case Scenario::Scan: report = run_scan(config); break;
    case Scenario::Fringes: report = run_fringes(config); break;
    case Scenario::Tomo: report = run_tomo(config); break;
    case Scenario::Full: report = run_full(config); break;
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace specklewalk
