#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specklewalk/config.hpp"
#include "specklewalk/error.hpp"
#include "specklewalk/harness.hpp"

namespace {

// One line on stderr, "error: <kind>: <message>", for scripts to parse.
int fail(std::string_view kind, const std::string& message, int code) {
  std::cerr << "error: " << kind << ": " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specklewalk: single-photon wavefront shaping through a scattering medium"};
  std::string scenario;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("scenario", scenario, "focus | scan | fringes | tomo | full")
      ->required()
      ->check(CLI::IsMember({"focus", "scan", "fringes", "tomo", "full"}));
  app.add_option("--config", config_path, "Experiment config file (INI)")->required();
  app.add_option("--seed", seed, "Master seed, overrides [experiment] seed");
  app.add_option("--out", out_dir, "Output directory, overrides [experiment] output_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    specklewalk::ExperimentConfig config = specklewalk::load_config(config_path);
    config.scenario = specklewalk::parse_scenario(scenario);
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    const auto report = specklewalk::run_scenario(config);
    std::cout << "scenario=" << scenario << " seed=" << report.config.seed
              << " files=" << report.files.size() << " wall_time=" << report.wall_time << "s\n";
    for (const auto& f : report.files) std::cout << "  " << f.string() << '\n';
    return 0;
  } catch (const specklewalk::Error& e) {
    return fail(specklewalk::to_string(e.kind()), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}
