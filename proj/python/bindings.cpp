// Python module ddlab._ddlab.

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddlab/analysis.hpp"
#include "ddlab/avgham.hpp"
#include "ddlab/cli.hpp"
#include "ddlab/config.hpp"
#include "ddlab/engine.hpp"
#include "ddlab/errors.hpp"

namespace py = pybind11;
using namespace ddlab;

namespace {

PulseAxis to_pulse_axis(const std::string& s) { return parse_pulse_axis(s); }

ErrorModel make_errors(const std::string& rf, double low, double high, double weight, double mean, double sd,
                       double flip, double tilt) {
  ErrorModel e;
  if (rf == "fixed" || rf == "none") e.rf = RfDistribution::fixed();
  else if (rf == "bimodal") e.rf = RfDistribution::bimodal(low, high, weight);
  else if (rf == "gaussian") e.rf = RfDistribution::gaussian(mean, sd);
  else throw ContractError("unknown rf distribution '" + rf + "'");
  e.flip_angle_error = flip;
  e.axis_tilt = tilt;
  e.validate();
  return e;
}

Timeline compile(const std::string& family, double tau, double tau_p, int cycles, int order) {
  switch (parse_family(family)) {
    case Family::Free: return compile_free(tau, cycles);
    case Family::Hahn: return compile_hahn(tau, tau_p, cycles);
    case Family::CP: return compile_cpmg(tau, tau_p, cycles, CpmgVariant::CP);
    case Family::CPMG: return compile_cpmg(tau, tau_p, cycles, CpmgVariant::CPMG);
    case Family::CPMG2: return compile_cpmg(tau, tau_p, cycles, CpmgVariant::CPMG2);
    case Family::PDD: return compile_pdd(tau, tau_p, cycles);
    case Family::CDD: return compile_cdd(order, tau, tau_p, cycles);
    case Family::UDD: return compile_udd(order, tau, tau_p, cycles);
  }
  throw ContractError("unknown family");
}

}  // namespace

PYBIND11_MODULE(_ddlab, m) {
  m.doc() = "Dynamical decoupling of a central spin coupled to a spin bath";

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.attr("KHZ_TO_RAD_PER_US") = kKhzToRadPerUs;

  py::class_<SpinBathModel, std::shared_ptr<SpinBathModel>>(m, "SpinBathModel")
      .def(py::init<Eigen::VectorXd, Eigen::MatrixXd>(), py::arg("b"), py::arg("d"))
      .def_property_readonly("n_bath", &SpinBathModel::n_bath)
      .def_property_readonly("b", &SpinBathModel::b)
      .def_property_readonly("d", &SpinBathModel::d)
      .def("h_se", [](const SpinBathModel& s) { return Matrix(build_h_se(s)); })
      .def("h_e", [](const SpinBathModel& s) { return Matrix(build_h_e(s)); })
      .def("h_free", [](const SpinBathModel& s) { return Matrix(build_h_free(s)); });

  m.def(
      "random_model",
      [](int n_bath, double b_scale, double d_scale, std::uint64_t seed, const std::string& dist) {
        CouplingSpec spec;
        spec.n_bath = n_bath;
        spec.b_scale = b_scale;
        spec.d_scale = d_scale;
        spec.seed = seed;
        if (dist == "gaussian") spec.distribution = CouplingDistribution::Gaussian;
        else if (dist != "uniform_symmetric") throw ContractError("unknown distribution '" + dist + "'");
        auto c = sample_couplings(spec);
        return std::make_shared<SpinBathModel>(c.b, c.d);
      },
      py::arg("n_bath"), py::arg("b_scale"), py::arg("d_scale"), py::arg("seed") = 0,
      py::arg("distribution") = "uniform_symmetric", "Random couplings in rad/us.");

  m.def(
      "default_model", [] { return build_model(default_config()); }, "Calibrated default bath.");

  py::class_<PulseEvent>(m, "PulseEvent")
      .def_readonly("start", &PulseEvent::start)
      .def_property_readonly("axis", [](const PulseEvent& e) { return std::string(pulse_axis_name(e.axis)); })
      .def_readonly("angle", &PulseEvent::angle)
      .def_readonly("duration", &PulseEvent::duration)
      .def("__repr__", [](const PulseEvent& e) {
        std::ostringstream os;
        os << "PulseEvent(start=" << e.start << ", axis='" << pulse_axis_name(e.axis) << "', duration=" << e.duration
           << ")";
        return os.str();
      });

  py::class_<Timeline>(m, "Timeline")
      .def_readonly("events", &Timeline::events)
      .def_readonly("cycle_time", &Timeline::cycle_time)
      .def_readonly("n_cycles", &Timeline::n_cycles)
      .def_readonly("label", &Timeline::label)
      .def_readonly("pulses_per_cycle", &Timeline::pulses_per_cycle)
      .def_readonly("free_periods_per_cycle", &Timeline::free_periods_per_cycle)
      .def("total_time", &Timeline::total_time)
      .def("validate", [](const Timeline& t) { return validate_timeline(t); })
      .def("dumps", [](const Timeline& t) {
        std::ostringstream os;
        write_timeline(os, t);
        return os.str();
      });

  m.def("compile", &compile, py::arg("family"), py::arg("tau"), py::arg("tau_p") = 0.0, py::arg("cycles") = 1,
        py::arg("order") = 1,
        "Compile a sequence family; for udd `tau` is the cycle time and `order` the pulse count.");
  m.def("cdd_pulse_count", &cdd_pulse_count);
  m.def("pi_pulse_duration_us", &pi_pulse_duration_us);

  py::class_<ErrorModel>(m, "ErrorModel")
      .def(py::init(&make_errors), py::arg("rf") = "fixed", py::arg("low") = 0.95, py::arg("high") = 1.05,
           py::arg("weight") = 0.5, py::arg("mean") = 1.0, py::arg("sd") = 0.1, py::arg("flip_angle_error") = 0.0,
           py::arg("axis_tilt") = 0.0)
      .def_readonly("flip_angle_error", &ErrorModel::flip_angle_error)
      .def_readonly("axis_tilt", &ErrorModel::axis_tilt)
      .def("is_ideal", &ErrorModel::is_ideal);

  py::class_<SurvivalTrace>(m, "SurvivalTrace")
      .def_readonly("times", &SurvivalTrace::times)
      .def_readonly("n_pulses", &SurvivalTrace::n_pulses)
      .def_readonly("s", &SurvivalTrace::s)
      .def_readonly("std_error", &SurvivalTrace::std_error)
      .def_readonly("label", &SurvivalTrace::label)
      .def("__len__", &SurvivalTrace::size);

  m.def(
      "propagate",
      [](std::shared_ptr<SpinBathModel> model, const Timeline& tl, const ErrorModel& errors, const std::string& axis,
         int realizations, std::uint64_t seed, bool every_pulse, int threads) {
        RunSpec spec{model, tl, errors, parse_axis(axis), realizations, seed,
                     every_pulse ? RecordMode::EveryPulse : RecordMode::CycleBoundaries, threads};
        py::gil_scoped_release release;
        return propagate(spec);
      },
      py::arg("model"), py::arg("timeline"), py::arg("errors") = ErrorModel{}, py::arg("axis") = "x",
      py::arg("realizations") = 1, py::arg("seed") = 0, py::arg("every_pulse") = false, py::arg("threads") = 1);

  m.def(
      "bath_correlation",
      [](const SpinBathModel& model, const std::vector<double>& t, const std::string& which, int spin) {
        if (which == "ix_total") return bath_correlation(model, t, CorrelationKind::IxTotal);
        if (which == "iz") return bath_correlation(model, t, CorrelationKind::IzSingle, spin);
        if (which == "iz_mean") return bath_correlation_iz_mean(model, t);
        throw ContractError("unknown correlation '" + which + "'");
      },
      py::arg("model"), py::arg("t"), py::arg("which") = "iz_mean", py::arg("spin") = 0);

  m.def(
      "estimate_tau_b",
      [](const std::vector<double>& series, const std::vector<double>& t) {
        auto e = estimate_tau_b(series, t);
        return py::dict(py::arg("reached") = e.reached, py::arg("tau") = e.tau, py::arg("end_value") = e.end_value);
      },
      py::arg("series"), py::arg("t"));

  m.def(
      "decay_time",
      [](const SurvivalTrace& tr, const std::string& method) {
        auto d = decay_time(tr, parse_decay_method(method));
        return py::dict(py::arg("reached") = d.reached, py::arg("decay_time") = d.decay_time,
                        py::arg("end_value") = d.end_value, py::arg("method") = decay_method_name(d.method));
      },
      py::arg("trace"), py::arg("method") = "one_over_e");

  m.def(
      "average_hamiltonian",
      [](const Timeline& tl, const Matrix& h, const SpinBathModel& model, int order) {
        return Matrix(average_hamiltonian(toggling_frames(tl, h, model.ops()), order));
      },
      py::arg("timeline"), py::arg("h"), py::arg("model"), py::arg("order") = 0);

  m.def(
      "verify_claim",
      [](const std::string& id, const SpinBathModel& model) {
        auto r = verify_claim(id, model);
        return py::dict(py::arg("claim") = r.claim, py::arg("description") = r.description,
                        py::arg("norms") = r.norms, py::arg("tolerance") = r.tolerance, py::arg("pass") = r.pass);
      },
      py::arg("claim"), py::arg("model"));
  m.def("claim_ids", &claim_ids);

  m.def(
      "fit_order_relation",
      [](const std::vector<std::pair<double, double>>& points, double tau_b) {
        auto f = fit_order_relation(points, tau_b);
        return py::dict(py::arg("c") = f.c, py::arg("c_sd") = f.c_sd, py::arg("b") = f.b, py::arg("b_sd") = f.b_sd);
      },
      py::arg("points"), py::arg("tau_b"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int rc = run_cli(args, out, err);
        return py::make_tuple(rc, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line front end; returns (exit_code, stdout, stderr).");
}
