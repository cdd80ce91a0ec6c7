#include "specklewalk/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "specklewalk/error.hpp"

namespace specklewalk {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw Error(ErrorKind::InvalidConfig, "config: " + key + " = '" + value + "': " + what);
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) bad_value(key, value, "not a number");
  return out;
}

std::vector<std::size_t> parse_index_list(const std::string& key, const std::string& raw) {
  std::vector<std::size_t> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<std::size_t>(key, item));
  if (out.empty()) bad_value(key, raw, "empty list");
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt_double(double v) {
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;
using SectionTable = std::map<std::string, Setter, std::less<>>;

template <typename T>
Setter number_field(T ExperimentConfig::*member) {
  return [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.*member = parse_number<T>(k, v);
  };
}

template <typename Sub, typename T>
Setter nested_field(Sub ExperimentConfig::*sub, T Sub::*member) {
  return [sub, member](ExperimentConfig& c, const std::string& k, const std::string& v) {
    (c.*sub).*member = parse_number<T>(k, v);
  };
}

const std::map<std::string, SectionTable, std::less<>>& schema() {
  static const std::map<std::string, SectionTable, std::less<>> table = {
      {"experiment",
       {{"scenario",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
           c.scenario = parse_scenario(trim(v));
         }},
        {"seed", number_field(&ExperimentConfig::seed)},
        {"output_dir",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
           c.output_dir = trim(v);
         }},
        {"n_steps", number_field(&ExperimentConfig::n_steps)},
        {"counts_per_step", number_field(&ExperimentConfig::counts_per_step)},
        {"phase_jitter", number_field(&ExperimentConfig::phase_jitter)},
        {"step_duration", number_field(&ExperimentConfig::step_duration)},
        {"scan_halfwidth", number_field(&ExperimentConfig::scan_halfwidth)},
        {"slm_grid", number_field(&ExperimentConfig::slm_grid)}}},
      {"medium",
       {{"n_in", nested_field(&ExperimentConfig::medium, &MediumConfig::n_in)},
        {"m_out", nested_field(&ExperimentConfig::medium, &MediumConfig::m_out)},
        {"transmission", nested_field(&ExperimentConfig::medium, &MediumConfig::transmission)},
        {"mean_free_path_note",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
           c.medium.mean_free_path_note = trim(v);
         }}}},
      {"calibration",
       {{"phase_steps", nested_field(&ExperimentConfig::calibration, &CalibrationConfig::phase_steps)},
        {"photons_per_measurement",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
           if (trim(v) == "noiseless") {
             c.calibration.photons_per_measurement.reset();
           } else {
             c.calibration.photons_per_measurement = parse_number<double>(k, v);
           }
         }}}},
      {"source",
       {{"trigger_rate", nested_field(&ExperimentConfig::source, &SourceConfig::trigger_rate)},
        {"heralding_efficiency",
         nested_field(&ExperimentConfig::source, &SourceConfig::heralding_efficiency)},
        {"collection_efficiency",
         nested_field(&ExperimentConfig::source, &SourceConfig::collection_efficiency)},
        {"coincidence_window",
         nested_field(&ExperimentConfig::source, &SourceConfig::coincidence_window)},
        {"acquisition_time", nested_field(&ExperimentConfig::source, &SourceConfig::acquisition_time)},
        {"double_pair_mean", nested_field(&ExperimentConfig::source, &SourceConfig::double_pair_mean)},
        {"dark_rate", nested_field(&ExperimentConfig::source, &SourceConfig::dark_rate)}}},
      {"targets",
       {{"modes",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
           c.target_modes = parse_index_list(k, v);
         }}}},
  };
  return table;
}

}  // namespace

std::string_view to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::Focus: return "focus";
    case Scenario::Scan: return "scan";
    case Scenario::Fringes: return "fringes";
    case Scenario::Tomo: return "tomo";
    case Scenario::Full: return "full";
  }
  return "full";
}

Scenario parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::Focus, Scenario::Scan, Scenario::Fringes, Scenario::Tomo,
                     Scenario::Full}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown scenario '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  medium.validate();
  calibration.validate();
  source.validate();
  if (target_modes.empty()) throw Error(ErrorKind::InvalidConfig, "targets: no modes given");
  std::set<std::size_t> distinct(target_modes.begin(), target_modes.end());
  if (distinct.size() != target_modes.size()) {
    throw Error(ErrorKind::InvalidConfig, "targets: modes must be distinct");
  }
  for (auto m : target_modes) {
    if (m >= medium.m_out) {
      throw Error(ErrorKind::InvalidConfig, "targets: mode " + std::to_string(m) + " >= m_out");
    }
  }
  if (n_steps < 5) throw Error(ErrorKind::InvalidConfig, "experiment: n_steps must be >= 5");
  if (!(counts_per_step >= 0.0) || !std::isfinite(counts_per_step)) {
    throw Error(ErrorKind::InvalidConfig, "experiment: counts_per_step must be >= 0");
  }
  if (!(phase_jitter >= 0.0) || !std::isfinite(phase_jitter)) {
    throw Error(ErrorKind::InvalidConfig, "experiment: phase_jitter must be >= 0");
  }
  if (!(step_duration > 0.0) || !std::isfinite(step_duration)) {
    throw Error(ErrorKind::InvalidConfig, "experiment: step_duration must be > 0");
  }
  if (slm_grid < 1) throw Error(ErrorKind::InvalidConfig, "experiment: slm_grid must be >= 1");
  const bool needs_pair = scenario == Scenario::Fringes || scenario == Scenario::Tomo ||
                          scenario == Scenario::Full;
  if (needs_pair && target_modes.size() != 2) {
    throw Error(ErrorKind::InvalidConfig,
                std::string("targets: scenario '") + std::string(to_string(scenario)) +
                    "' needs exactly two modes");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  // '#' comments are accepted alongside the ';' comments the INI reader knows.
  std::stringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    cleaned << (t.starts_with('#') ? std::string() : line) << '\n';
  }
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(cleaned, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config: ") + e.what());
  }

  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    const auto sec = schema().find(section);
    if (sec == schema().end() || !body.data().empty()) {
      throw Error(ErrorKind::InvalidConfig, "config: unknown section or top-level key '" + section + "'");
    }
    for (const auto& [key, node] : body) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) {
        throw Error(ErrorKind::InvalidConfig, "config: unknown key '" + section + "." + key + "'");
      }
      setter->second(config, section + "." + key, node.data());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  return parse_config(in);
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\n"
      << "scenario = " << to_string(c.scenario) << '\n'
      << "seed = " << c.seed << '\n'
      << "output_dir = " << c.output_dir.string() << '\n'
      << "n_steps = " << c.n_steps << '\n'
      << "counts_per_step = " << fmt_double(c.counts_per_step) << '\n'
      << "phase_jitter = " << fmt_double(c.phase_jitter) << '\n'
      << "step_duration = " << fmt_double(c.step_duration) << '\n'
      << "scan_halfwidth = " << c.scan_halfwidth << '\n'
      << "slm_grid = " << c.slm_grid << "\n\n";
  out << "[medium]\n"
      << "n_in = " << c.medium.n_in << '\n'
      << "m_out = " << c.medium.m_out << '\n'
      << "transmission = " << fmt_double(c.medium.transmission) << '\n';
  if (c.medium.mean_free_path_note) {
    out << "mean_free_path_note = " << *c.medium.mean_free_path_note << '\n';
  }
  out << "\n[calibration]\n"
      << "phase_steps = " << c.calibration.phase_steps << '\n'
      << "photons_per_measurement = "
      << (c.calibration.photons_per_measurement ? fmt_double(*c.calibration.photons_per_measurement)
                                                : std::string("noiseless"))
      << "\n\n";
  const SourceConfig& s = c.source;
  out << "[source]\n"
      << "trigger_rate = " << fmt_double(s.trigger_rate) << '\n'
      << "heralding_efficiency = " << fmt_double(s.heralding_efficiency) << '\n'
      << "collection_efficiency = " << fmt_double(s.collection_efficiency) << '\n'
      << "coincidence_window = " << fmt_double(s.coincidence_window) << '\n'
      << "acquisition_time = " << fmt_double(s.acquisition_time) << '\n'
      << "double_pair_mean = " << fmt_double(s.double_pair_mean) << '\n'
      << "dark_rate = " << fmt_double(s.dark_rate) << "\n\n";
  out << "[targets]\nmodes = ";
  for (std::size_t i = 0; i < c.target_modes.size(); ++i) {
    out << (i ? ", " : "") << c.target_modes[i];
  }
  out << '\n';
  return out.str();
}

}  // namespace specklewalk
