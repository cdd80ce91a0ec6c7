#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "specklewalk/calibration.hpp"
#include "specklewalk/error.hpp"
#include "specklewalk/harness.hpp"
#include "specklewalk/medium.hpp"
#include "specklewalk/quantum.hpp"
#include "specklewalk/slm.hpp"
#include "specklewalk/tomography.hpp"

namespace py = pybind11;
namespace sw = specklewalk;

namespace {

using ComplexArray = py::array_t<sw::Complex, py::array::c_style | py::array::forcecast>;
using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

sw::ScatteringMatrix to_matrix(const ComplexArray& a) {
  if (a.ndim() != 2) throw sw::Error(sw::ErrorKind::Dimension, "expected a 2-D complex array");
  const auto* p = a.data();
  return sw::ScatteringMatrix(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                              std::vector<sw::Complex>(p, p + a.size()));
}

ComplexArray from_matrix(const sw::ScatteringMatrix& s) {
  ComplexArray out({s.m_out(), s.n_in()});
  std::copy(s.entries().begin(), s.entries().end(), out.mutable_data());
  return out;
}

template <class T, class Span>
py::array_t<T> to_array(const Span& values) {
  py::array_t<T> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const RealArray& a) {
  if (a.ndim() != 1) throw sw::Error(sw::ErrorKind::Dimension, "expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

sw::PhaseMask to_mask(const RealArray& a) { return sw::PhaseMask(to_vector(a)); }

py::dict counts_dict(const sw::CountRecord& c) {
  py::dict d;
  d["n_T"] = c.n_T;
  d["n_A"] = c.n_A;
  d["n_B"] = c.n_B;
  d["n_AT"] = c.n_AT;
  d["n_BT"] = c.n_BT;
  d["n_ABT"] = c.n_ABT;
  return d;
}

sw::CountRecord counts_record(const py::dict& d) {
  sw::CountRecord c;
  c.n_T = d["n_T"].cast<std::uint64_t>();
  c.n_A = d["n_A"].cast<std::uint64_t>();
  c.n_B = d["n_B"].cast<std::uint64_t>();
  c.n_AT = d["n_AT"].cast<std::uint64_t>();
  c.n_BT = d["n_BT"].cast<std::uint64_t>();
  c.n_ABT = d["n_ABT"].cast<std::uint64_t>();
  return c;
}

}  // namespace

PYBIND11_MODULE(specklewalk, m) {
  m.doc() = "Scattering-medium single-photon focusing and entanglement simulator";
  m.attr("__version__") = SPECKLEWALK_VERSION;

  // The module keeps the exception type alive for the interpreter's lifetime.
  static PyObject* error_type = py::exception<sw::Error>(m, "Error", PyExc_RuntimeError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sw::Error& e) {
      const std::string kind(sw::to_string(e.kind()));
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(kind + ": " + e.what());
      exc.attr("kind") = kind;
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<sw::SourceConfig>(m, "SourceConfig")
      .def(py::init<>())
      .def_readwrite("trigger_rate", &sw::SourceConfig::trigger_rate)
      .def_readwrite("heralding_efficiency", &sw::SourceConfig::heralding_efficiency)
      .def_readwrite("collection_efficiency", &sw::SourceConfig::collection_efficiency)
      .def_readwrite("coincidence_window", &sw::SourceConfig::coincidence_window)
      .def_readwrite("acquisition_time", &sw::SourceConfig::acquisition_time)
      .def_readwrite("double_pair_mean", &sw::SourceConfig::double_pair_mean)
      .def_readwrite("dark_rate", &sw::SourceConfig::dark_rate)
      .def("validate", &sw::SourceConfig::validate);

  m.def(
      "generate_medium",
      [](std::size_t n_in, std::size_t m_out, double transmission, std::uint64_t seed) {
        return from_matrix(sw::generate_medium(sw::MediumConfig{n_in, m_out, transmission, seed, {}}));
      },
      py::arg("n_in"), py::arg("m_out"), py::arg("transmission") = 1.0, py::arg("seed") = 0,
      "Random medium as an (m_out, n_in) complex128 array.");
  m.def(
      "propagate",
      [](const ComplexArray& s, const ComplexArray& e_in) {
        if (e_in.ndim() != 1) throw sw::Error(sw::ErrorKind::Dimension, "expected a 1-D input field");
        const auto out = sw::propagate(
            to_matrix(s), sw::ComplexField({e_in.data(), e_in.data() + e_in.size()}));
        return to_array<sw::Complex>(out.amplitudes());
      },
      py::arg("s"), py::arg("e_in"));
  m.def("speckle_contrast", [](const RealArray& i) { return sw::speckle_contrast(to_vector(i)); });
  m.def("save_smx1", [](const std::filesystem::path& path, const ComplexArray& s) {
    sw::save_smx1(path, to_matrix(s));
  });
  m.def("load_smx1", [](const std::filesystem::path& path) { return from_matrix(sw::load_smx1(path)); });

  m.def(
      "random_mask",
      [](std::size_t n, std::uint64_t seed) { return to_array<double>(sw::random_mask(n, seed).phases()); },
      py::arg("n"), py::arg("seed"));
  m.def(
      "conjugate_mask",
      [](const ComplexArray& s, std::size_t target) {
        return to_array<double>(sw::conjugate_mask(to_matrix(s), sw::single_target(target)).phases());
      },
      py::arg("s"), py::arg("target"), "Phase-only mask focusing onto one output mode.");
  m.def(
      "dual_target_mask",
      [](const ComplexArray& s, std::size_t a, std::size_t b, double phi) {
        const auto matrix = to_matrix(s);
        return to_array<double>(
            sw::conjugate_mask(matrix, sw::balanced_dual_target(matrix, a, b, phi)).phases());
      },
      py::arg("s"), py::arg("mode_a"), py::arg("mode_b"), py::arg("relative_phase"),
      "Mask splitting light equally between two modes with arg(E_a) - arg(E_b) = relative_phase.");
  m.def(
      "enhancement",
      [](const ComplexArray& s, const RealArray& mask, std::size_t target) {
        return sw::enhancement(to_matrix(s), to_mask(mask), target);
      },
      py::arg("s"), py::arg("mask"), py::arg("target"));

  m.def(
      "measure_sm",
      [](const ComplexArray& s, int phase_steps, std::optional<double> photons, std::uint64_t reference_seed) {
        const auto est = sw::measure_sm(to_matrix(s), sw::CalibrationConfig{phase_steps, photons, reference_seed});
        return py::make_tuple(from_matrix(est.matrix), est.flagged_rows);
      },
      py::arg("s"), py::arg("phase_steps") = 4, py::arg("photons") = py::none(), py::arg("reference_seed") = 0,
      "Phase-stepping estimate; returns (estimate, flagged_rows).");
  m.def("sm_fidelity", [](const ComplexArray& truth, const ComplexArray& estimate) {
    return to_array<double>(sw::sm_fidelity(to_matrix(truth), to_matrix(estimate)));
  });

  m.def(
      "mode_probabilities",
      [](const ComplexArray& s, const RealArray& mask, std::size_t a, std::size_t b, double collection) {
        const auto q = sw::mode_probabilities(to_matrix(s), to_mask(mask), a, b, collection);
        return py::make_tuple(q.q_a, q.q_b);
      },
      py::arg("s"), py::arg("mask"), py::arg("mode_a"), py::arg("mode_b"), py::arg("collection_efficiency"));
  m.def(
      "simulate_counts",
      [](double q_a, double q_b, const sw::SourceConfig& source, std::uint64_t seed) {
        return counts_dict(sw::simulate_counts(q_a, q_b, source, seed));
      },
      py::arg("q_a"), py::arg("q_b"), py::arg("source") = sw::SourceConfig{}, py::arg("seed") = 0);
  m.def(
      "estimate_state",
      [](const py::dict& counts, double d_mag) {
        const auto est = sw::estimate_state(counts_record(counts), d_mag);
        py::dict d;
        d["p00"] = est.state.p00;
        d["p01"] = est.state.p01;
        d["p10"] = est.state.p10;
        d["p11"] = est.state.p11;
        d["d_mag"] = est.state.d_mag;
        d["err_p00"] = est.err_p00;
        d["err_p01"] = est.err_p01;
        d["err_p10"] = est.err_p10;
        d["err_p11"] = est.err_p11;
        d["d_clamped"] = est.d_clamped;
        return d;
      },
      py::arg("counts"), py::arg("d_mag") = 0.0);

  m.def(
      "fit_visibility",
      [](const RealArray& phi, const py::array_t<std::uint64_t, py::array::forcecast>& counts,
         std::optional<RealArray> duration) {
        const auto phases = to_vector(phi);
        if (counts.ndim() != 1 || static_cast<std::size_t>(counts.size()) != phases.size()) {
          throw sw::Error(sw::ErrorKind::Dimension, "phi and counts must be 1-D of equal length");
        }
        std::vector<double> t(phases.size(), 1.0);
        if (duration) t = to_vector(*duration);
        if (t.size() != phases.size()) throw sw::Error(sw::ErrorKind::Dimension, "duration length mismatch");
        std::vector<sw::FringePoint> pts;
        for (std::size_t i = 0; i < phases.size(); ++i) pts.push_back({phases[i], counts.at(i), t[i]});
        const auto fit = sw::fit_visibility(sw::FringeScan(std::move(pts)));
        py::dict d;
        d["visibility"] = fit.visibility;
        d["visibility_err"] = fit.visibility_err;
        d["offset"] = fit.offset;
        d["phase0"] = fit.phase0;
        d["residual_rms"] = fit.residual_rms;
        return d;
      },
      py::arg("phi"), py::arg("counts"), py::arg("duration") = py::none());
  m.def("coherence_from_visibility", &sw::coherence_from_visibility, py::arg("visibility"), py::arg("p01"),
        py::arg("p10"));
  m.def(
      "density_matrix",
      [](double p00, double p01, double p10, double p11, double d_mag, double phase) {
        const auto rho = sw::build_density_matrix(sw::TwoModeState{p00, p01, p10, p11, d_mag}, phase);
        ComplexArray out({4, 4});
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) out.mutable_at(i, j) = rho.entries()(i, j);
        }
        return out;
      },
      py::arg("p00"), py::arg("p01"), py::arg("p10"), py::arg("p11"), py::arg("d_mag"), py::arg("phase") = 0.0);
  m.def("concurrence", &sw::concurrence, py::arg("p00"), py::arg("p11"), py::arg("d_mag"));
  m.def("poisson_upper_limit", &sw::poisson_upper_limit, py::arg("n_obs"), py::arg("confidence"));
  m.def("concurrence_threshold", &sw::concurrence_threshold, py::arg("n_t"), py::arg("d_mag"), py::arg("p00"));
  m.def(
      "positivity_confidence",
      [](std::uint64_t n_obs, std::int64_t threshold) {
        return sw::positivity_confidence(n_obs, threshold).confidence;
      },
      py::arg("n_obs"), py::arg("threshold"));

  m.def(
      "run",
      [](const std::string& scenario, const std::filesystem::path& config, std::optional<std::uint64_t> seed,
         std::optional<std::filesystem::path> out) {
        auto c = sw::load_config(config);
        c.scenario = sw::parse_scenario(scenario);
        if (seed) c.seed = *seed;
        if (out) c.output_dir = *out;
        const auto report = sw::run_scenario(c);
        py::object loads = py::module_::import("json").attr("loads");
        py::dict d = loads(report.to_json().dump());
        d["wall_time"] = report.wall_time;
        std::vector<std::string> files;
        for (const auto& f : report.files) files.push_back(f.string());
        d["files"] = files;
        return d;
      },
      py::arg("scenario"), py::arg("config"), py::arg("seed") = py::none(), py::arg("out") = py::none(),
      "Runs a scenario from a config file; returns the report as a dict.");
}
