#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "asrnlab/asrn.hpp"
#include "asrnlab/bandit.hpp"
#include "asrnlab/errors.hpp"
#include "asrnlab/experiments.hpp"
#include "asrnlab/kvdoc.hpp"
#include "asrnlab/qlearn.hpp"
#include "asrnlab/telemetry.hpp"

namespace py = pybind11;
using namespace asrnlab;

PYBIND11_MODULE(_asrnlab, m) {
  m.doc() = "Variance-difference bandit lab: Q-learning agents, trap "
            "telemetry and adaptive symmetric reward noising";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CalibrationError>(m, "CalibrationError",
                                           PyExc_ValueError);
  py::register_exception<PhaseError>(m, "PhaseError", PyExc_RuntimeError);
  py::register_exception<InvalidActionError>(m, "InvalidActionError",
                                             PyExc_IndexError);
  py::register_exception<InvalidDiscountError>(m, "InvalidDiscountError",
                                               PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);

  // random streams
  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &RandomStream::next_u64)
      .def("next_unit", &RandomStream::next_unit)
      .def("next_below", &RandomStream::next_below, py::arg("n"))
      .def("next_normal", &RandomStream::next_normal, py::arg("mean"),
           py::arg("sigma"));
  py::enum_<StreamPurpose>(m, "StreamPurpose")
      .value("environment", StreamPurpose::environment)
      .value("action", StreamPurpose::action)
      .value("noise", StreamPurpose::noise);
  m.def("make_agent_stream", &make_agent_stream, py::arg("master_seed"),
        py::arg("agent_id"), py::arg("purpose"));

  // bandit environment
  py::class_<ArmSpec>(m, "ArmSpec")
      .def(py::init<double, double>(), py::arg("mean") = 0.0,
           py::arg("std") = 0.0)
      .def_readwrite("mean", &ArmSpec::mean)
      .def_readwrite("std", &ArmSpec::std)
      .def("__repr__", [](const ArmSpec& a) {
        return "ArmSpec(mean=" + format_double(a.mean) +
               ", std=" + format_double(a.std) + ")";
      });
  py::class_<BanditEnv>(m, "BanditEnv")
      .def(py::init<std::vector<ArmSpec>>(), py::arg("arms"))
      .def_property_readonly("num_arms", &BanditEnv::num_arms)
      .def("pull", &BanditEnv::pull, py::arg("arm"), py::arg("rng"));

  // q-learning kernel
  py::enum_<QTarget>(m, "QTarget")
      .value("table_max", QTarget::table_max)
      .value("terminal", QTarget::terminal);
  py::enum_<EpsilonDecay>(m, "EpsilonDecay")
      .value("multiplicative", EpsilonDecay::multiplicative)
      .value("linear", EpsilonDecay::linear)
      .value("exponential", EpsilonDecay::exponential);
  py::class_<AgentConfig>(m, "AgentConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &AgentConfig::alpha)
      .def_readwrite("gamma", &AgentConfig::gamma)
      .def_readwrite("epsilon0", &AgentConfig::epsilon0)
      .def_readwrite("epsilon_decay_rate", &AgentConfig::epsilon_decay_rate)
      .def_readwrite("decay_form", &AgentConfig::decay_form)
      .def_readwrite("q_target", &AgentConfig::q_target);
  m.def("init_optimal", &init_optimal, py::arg("arm_means"), py::arg("gamma"));
  m.def("select_action", &select_action, py::arg("qtable"),
        py::arg("epsilon"), py::arg("rng"));
  m.def(
      "q_update",
      [](QTable qtable, std::size_t action, double reward, double alpha,
         double gamma, QTarget target) {
        const double upsilon =
            q_update(qtable, action, reward, alpha, gamma, target);
        return py::make_tuple(qtable, upsilon);
      },
      py::arg("qtable"), py::arg("action"), py::arg("reward"),
      py::arg("alpha"), py::arg("gamma"),
      py::arg("target") = QTarget::table_max,
      "Returns (new_qtable, upsilon); the input table is unchanged.");
  m.def("would_be_update", &would_be_update, py::arg("qtable"),
        py::arg("action"), py::arg("reward"), py::arg("alpha"),
        py::arg("gamma"), py::arg("target") = QTarget::table_max);

  // asrn engine
  py::enum_<BinningMode>(m, "BinningMode")
      .value("quantile", BinningMode::quantile)
      .value("equal_width", BinningMode::equal_width);
  py::class_<AsrnConfig>(m, "AsrnConfig")
      .def(py::init<>())
      .def_readwrite("num_bins", &AsrnConfig::num_bins)
      .def_readwrite("calibration_steps", &AsrnConfig::calibration_steps)
      .def_readwrite("binning", &AsrnConfig::binning);
  py::class_<CalibrationBuffer>(m, "CalibrationBuffer")
      .def(py::init<long>(), py::arg("capacity"))
      .def("observe", &CalibrationBuffer::observe, py::arg("upsilon"),
           py::arg("reward"))
      .def_property_readonly("full", &CalibrationBuffer::full)
      .def("__len__", &CalibrationBuffer::size);
  py::class_<NoiseTable>(m, "NoiseTable")
      .def(py::init<>())
      .def_readwrite("edges", &NoiseTable::edges)
      .def_readwrite("bin_std", &NoiseTable::bin_std)
      .def_readwrite("bin_noise", &NoiseTable::bin_noise)
      .def_readwrite("s_max", &NoiseTable::s_max)
      .def_property_readonly("num_bins", &NoiseTable::num_bins);
  m.def("finalize_calibration", &finalize_calibration, py::arg("buffer"),
        py::arg("config"));
  m.def("lookup_bin", &lookup_bin, py::arg("table"), py::arg("upsilon"));
  m.def("noise_reward", &noise_reward, py::arg("table"), py::arg("reward"),
        py::arg("upsilon"), py::arg("rng"));
  m.def("uniform_noise", &uniform_noise, py::arg("reward"), py::arg("sigma"),
        py::arg("rng"));
  m.def("write_noise_table", &write_noise_table, py::arg("table"));
  m.def("read_noise_table", &read_noise_table, py::arg("text"));

  py::class_<NoiserMode>(m, "NoiserMode")
      .def_static("off", &NoiserMode::off)
      .def_static("asrn", &NoiserMode::with_asrn, py::arg("config"))
      .def_static("uniform", &NoiserMode::with_uniform, py::arg("sigma"));
  py::class_<Noiser>(m, "Noiser")
      .def(py::init<const NoiserMode&>(), py::arg("mode"))
      .def_static("with_table", &Noiser::with_table, py::arg("table"))
      .def("process", &Noiser::process, py::arg("reward"), py::arg("upsilon"),
           py::arg("rng"))
      .def_property_readonly("calibrating", &Noiser::calibrating);

  // telemetry
  py::class_<StepRecord>(m, "StepRecord")
      .def_readonly("episode", &StepRecord::episode)
      .def_readonly("agent_id", &StepRecord::agent_id)
      .def_readonly("action", &StepRecord::action)
      .def_readonly("raw_reward", &StepRecord::raw_reward)
      .def_readonly("noised_reward", &StepRecord::noised_reward)
      .def_readonly("upsilon", &StepRecord::upsilon)
      .def_readonly("epsilon", &StepRecord::epsilon)
      .def_readonly("q_values", &StepRecord::q_values);
  py::class_<RunLog>(m, "RunLog")
      .def_readonly("agents", &RunLog::agents)
      .def_property_readonly("num_agents", &RunLog::num_agents)
      .def_property_readonly("num_episodes", &RunLog::num_episodes)
      .def("steps_csv", [](const RunLog& log) {
        std::ostringstream out;
        write_steps_csv(out, log);
        return out.str();
      });
  m.def("smooth", &smooth, py::arg("series"), py::arg("kernel_len"));
  m.def("success_fraction", &success_fraction, py::arg("log"),
        py::arg("episode"));
  m.def(
      "grouped_mean_upsilon",
      [](const RunLog& log, long episode) {
        const GroupedUpsilon g = grouped_mean_upsilon(log, episode);
        return py::make_tuple(g.mean_right, g.mean_left);
      },
      py::arg("log"), py::arg("episode"),
      "Returns (mean_right, mean_left); an unpulled side is None.");
  py::enum_<TrapEventKind>(m, "TrapEventKind")
      .value("enter", TrapEventKind::enter)
      .value("exit", TrapEventKind::exit);
  py::class_<TrapEvent>(m, "TrapEvent")
      .def_readonly("episode", &TrapEvent::episode)
      .def_readonly("kind", &TrapEvent::kind);
  m.def(
      "detect_trap_events",
      [](const std::vector<StepRecord>& log) {
        return detect_trap_events(log);
      },
      py::arg("log"));

  // experiments
  py::class_<SweepSpec>(m, "SweepSpec")
      .def(py::init<>())
      .def_readwrite("sigma_left_values", &SweepSpec::sigma_left_values)
      .def_readwrite("sigma_right_values", &SweepSpec::sigma_right_values);
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("arms", &ExperimentConfig::arms)
      .def_readwrite("num_agents", &ExperimentConfig::num_agents)
      .def_readwrite("num_episodes", &ExperimentConfig::num_episodes)
      .def_readwrite("agent", &ExperimentConfig::agent)
      .def_readwrite("noiser", &ExperimentConfig::noiser)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("sweep", &ExperimentConfig::sweep);
  py::class_<SweepCell>(m, "SweepCell")
      .def_readonly("sigma_left", &SweepCell::sigma_left)
      .def_readonly("sigma_right", &SweepCell::sigma_right)
      .def_readonly("num_success", &SweepCell::num_success)
      .def_readonly("num_agents", &SweepCell::num_agents)
      .def("__repr__", [](const SweepCell& c) {
        return "SweepCell(" + format_double(c.sigma_left) + ", " +
               format_double(c.sigma_right) + ": " +
               std::to_string(c.num_success) + "/" +
               std::to_string(c.num_agents) + ")";
      });
  m.def("run_population", &run_population, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_single_trace",
      [](const ExperimentConfig& config) {
        TraceResult result;
        {
          py::gil_scoped_release release;
          result = run_single_trace(config);
        }
        return py::make_tuple(result.log, result.events);
      },
      py::arg("config"), "Returns (log, trap_events).");
  m.def("run_variance_sweep", &run_variance_sweep, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("calibrate_noise_table", &calibrate_noise_table, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("default_sweep_spec", &default_sweep_spec);
}
