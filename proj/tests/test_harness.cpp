#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "specklewalk/error.hpp"
#include "specklewalk/harness.hpp"

using namespace specklewalk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("specklewalk_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small(const fs::path& dir) {
  ExperimentConfig c;
  c.output_dir = dir;
  c.medium.n_in = 64;
  c.medium.m_out = 256;
  c.target_modes = {10, 20};
  c.scan_halfwidth = 4;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> snapshot(const RunReport& r) {
  std::map<std::string, std::string> out;
  for (const auto& f : r.files) out[f.filename().string()] = slurp(f);
  return out;
}

ErrorKind kind_of(const ExperimentConfig& c) {
  try {
    run_scenario(c);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected throw");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("stage seeds are distinct and stable") {
  const auto a = stage_seeds(1);
  const auto b = stage_seeds(1);
  CHECK(a.medium == b.medium);
  CHECK(a.tomo_counts == b.tomo_counts);
  CHECK(a.medium != a.reference);
  CHECK(a.fringe_counts != a.tomo_counts);
  CHECK(stage_seeds(2).medium != a.medium);
}

TEST_CASE("full run writes every artifact and replays byte-identically") {
  const auto dir = scratch("replay");
  auto c = small(dir);
  const auto first = run_full(c);
  const auto bytes = snapshot(first);
  for (const char* name : {"estimate.smx1", "fidelity.csv", "focus_mask.csv", "random_mask.csv",
                           "focus_scan_conjugate.csv", "focus_scan_random.csv", "fringes.csv",
                           "visibility.json", "counts.json", "probabilities.csv", "tomography.json",
                           "config.ini", "report.json"}) {
    CAPTURE(name);
    CHECK(bytes.count(name) == 1);
  }
  const auto second = run_full(c);
  CHECK(snapshot(second) == bytes);
  CHECK(first.to_json() == second.to_json());

  c.seed = 2;
  CHECK(snapshot(run_full(c)).at("counts.json") != bytes.at("counts.json"));
}

TEST_CASE("report echoes a config that reproduces the run") {
  const auto dir = scratch("echo");
  const auto report = run_tomo(small(dir));
  const auto echoed = parse_config_text(slurp(dir / "config.ini"));
  CHECK(echoed == report.config);
  CHECK(report.to_json()["scenario"] == "tomo");
  CHECK(report.to_json()["result"].contains("tomography"));
  CHECK_FALSE(report.to_json().contains("wall_time"));
}

TEST_CASE("scenario dispatch and timing") {
  const auto dir = scratch("dispatch");
  auto c = small(dir);
  c.scenario = Scenario::Scan;
  const auto r = run_scenario(c);
  CHECK(r.scenario == Scenario::Scan);
  CHECK(r.wall_time >= 0.0);
  CHECK(r.files.size() == 4);
  CHECK(r.result["calibration"]["mean_row_fidelity"].get<double>() > 0.9);
}

TEST_CASE("missing output directory") {
  auto c = small(fs::temp_directory_path() / "specklewalk_no_such_dir_xyz");
  fs::remove_all(c.output_dir);
  CHECK(kind_of(c) == ErrorKind::Io);
}

TEST_CASE("no triggers makes state estimation fail") {
  auto c = small(scratch("dark"));
  c.scenario = Scenario::Tomo;
  c.source.acquisition_time = 1e-12;
  CHECK(kind_of(c) == ErrorKind::Estimation);
}

TEST_CASE("single target mode cannot drive fringes") {
  auto c = small(scratch("single"));
  c.scenario = Scenario::Fringes;
  c.target_modes = {10};
  CHECK(kind_of(c) == ErrorKind::InvalidConfig);
  c.scenario = Scenario::Focus;
  CHECK_NOTHROW(run_scenario(c));
}

TEST_CASE("a single input mode gives no focusing advantage") {
  auto c = small(scratch("n1"));
  c.medium.n_in = 1;
  const auto r = run_focus(c);
  const double conj = r.result["focus"]["conjugate"]["focused_fraction"].get<double>();
  const double rnd = r.result["focus"]["random"]["focused_fraction"].get<double>();
  CHECK(conj == doctest::Approx(rnd).epsilon(1e-12));
}

TEST_CASE("focusing beats the random baseline") {
  const auto r = run_focus(small(scratch("focus")));
  const auto& f = r.result["focus"];
  CHECK(f["conjugate"]["enhancement"].get<double>() > 10.0);
  CHECK(f["conjugate"]["focused_fraction"].get<double>() >
        10.0 * f["random"]["focused_fraction"].get<double>());
}

TEST_CASE("noiseless ideal fringes reach full visibility") {
  auto c = small(scratch("ideal"));
  c.medium = ExperimentConfig{}.medium;
  c.target_modes = {100, 200};
  c.calibration.photons_per_measurement.reset();
  c.phase_jitter = 0.0;
  c.counts_per_step = 1.0e6;
  const auto r = run_fringes(c);
  CHECK(r.result["fringes"]["visibility"].get<double>() >= 0.99);
}

TEST_CASE("visibility degrades with phase jitter") {
  auto c = small(scratch("jitter"));
  c.counts_per_step = 1.0e6;
  double last = 2.0;
  for (double jitter : {0.0, 0.5, 1.0, 1.5}) {
    c.phase_jitter = jitter;
    const double v = run_fringes(c).result["fringes"]["visibility"].get<double>();
    CHECK(v < last);
    last = v;
  }
}
