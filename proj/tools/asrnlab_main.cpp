// asrnlab: experiment harness for variance-difference bandit studies.
//
// Subcommands map to the canned experiments (broken-bandit, trace, sweep,
// noise-table); every run writes CSV artifacts plus a key=value summary
// and echoes its fully-resolved config so it can be replayed bit-for-bit.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "asrnlab/asrn.hpp"
#include "asrnlab/errors.hpp"
#include "asrnlab/experiments.hpp"
#include "asrnlab/kvdoc.hpp"
#include "asrnlab/telemetry.hpp"

namespace {

using namespace asrnlab;

std::string noiser_name(NoiserMode::Kind kind) {
  switch (kind) {
    case NoiserMode::Kind::off: return "off";
    case NoiserMode::Kind::asrn: return "asrn";
    case NoiserMode::Kind::uniform: return "uniform";
  }
  return "off";
}

std::string decay_name(EpsilonDecay form) {
  switch (form) {
    case EpsilonDecay::multiplicative: return "multiplicative";
    case EpsilonDecay::linear: return "linear";
    case EpsilonDecay::exponential: return "exponential";
  }
  return "multiplicative";
}

std::string target_name(QTarget target) {
  return target == QTarget::table_max ? "table_max" : "terminal";
}

NoiserMode::Kind parse_noiser(const std::string& name) {
  if (name == "off") return NoiserMode::Kind::off;
  if (name == "asrn") return NoiserMode::Kind::asrn;
  if (name == "uniform") return NoiserMode::Kind::uniform;
  throw ConfigError("unknown noiser mode: '" + name +
                    "' (expected off|asrn|uniform)");
}

EpsilonDecay parse_decay(const std::string& name) {
  if (name == "multiplicative") return EpsilonDecay::multiplicative;
  if (name == "linear") return EpsilonDecay::linear;
  if (name == "exponential") return EpsilonDecay::exponential;
  throw ConfigError("unknown epsilon decay form: '" + name + "'");
}

QTarget parse_target(const std::string& name) {
  if (name == "table_max" || name == "table-max") return QTarget::table_max;
  if (name == "terminal") return QTarget::terminal;
  throw ConfigError("unknown q target: '" + name +
                    "' (expected terminal|table_max)");
}

BinningMode parse_binning(const std::string& name) {
  if (name == "quantile") return BinningMode::quantile;
  if (name == "equal_width" || name == "equal-width")
    return BinningMode::equal_width;
  throw ConfigError("unknown binning mode: '" + name + "'");
}

KvDoc config_to_kv(const ExperimentConfig& c) {
  KvDoc doc;
  doc.set_int("agents", c.num_agents);
  doc.set_int("episodes", c.num_episodes);
  doc.set_double("alpha", c.agent.alpha);
  doc.set_double("gamma", c.agent.gamma);
  doc.set_double("epsilon0", c.agent.epsilon0);
  doc.set_double("epsilon_decay", c.agent.epsilon_decay_rate);
  doc.set("epsilon_decay_form", decay_name(c.agent.decay_form));
  doc.set("q_target", target_name(c.agent.q_target));
  doc.set_double("mu_left", c.arms[0].mean);
  doc.set_double("sigma_left", c.arms[0].std);
  doc.set_double("mu_right", c.arms[1].mean);
  doc.set_double("sigma_right", c.arms[1].std);
  doc.set("noiser", noiser_name(c.noiser.kind));
  doc.set_double("uniform_sigma", c.noiser.uniform_sigma);
  doc.set_int("bins", c.noiser.asrn.num_bins);
  doc.set_int("calibration_steps", c.noiser.asrn.calibration_steps);
  doc.set("binning", c.noiser.asrn.binning == BinningMode::quantile
                         ? "quantile"
                         : "equal_width");
  doc.set_uint("seed", c.master_seed);
  doc.set_int("threads", c.threads);
  if (c.sweep) {
    doc.set_doubles("sweep_sigma_left", c.sweep->sigma_left_values);
    doc.set_doubles("sweep_sigma_right", c.sweep->sigma_right_values);
  }
  return doc;
}

void apply_kv(const KvDoc& doc, ExperimentConfig& c) {
  if (auto v = doc.get_int("agents")) c.num_agents = static_cast<int>(*v);
  if (auto v = doc.get_int("episodes")) c.num_episodes = *v;
  if (auto v = doc.get_double("alpha")) c.agent.alpha = *v;
  if (auto v = doc.get_double("gamma")) c.agent.gamma = *v;
  if (auto v = doc.get_double("epsilon0")) c.agent.epsilon0 = *v;
  if (auto v = doc.get_double("epsilon_decay")) c.agent.epsilon_decay_rate = *v;
  if (auto v = doc.get("epsilon_decay_form"))
    c.agent.decay_form = parse_decay(*v);
  if (auto v = doc.get("q_target")) c.agent.q_target = parse_target(*v);
  if (auto v = doc.get_double("mu_left")) c.arms[0].mean = *v;
  if (auto v = doc.get_double("sigma_left")) c.arms[0].std = *v;
  if (auto v = doc.get_double("mu_right")) c.arms[1].mean = *v;
  if (auto v = doc.get_double("sigma_right")) c.arms[1].std = *v;
  if (auto v = doc.get("noiser")) c.noiser.kind = parse_noiser(*v);
  if (auto v = doc.get_double("uniform_sigma")) c.noiser.uniform_sigma = *v;
  if (auto v = doc.get_int("bins"))
    c.noiser.asrn.num_bins = static_cast<int>(*v);
  if (auto v = doc.get_int("calibration_steps"))
    c.noiser.asrn.calibration_steps = *v;
  if (auto v = doc.get("binning")) c.noiser.asrn.binning = parse_binning(*v);
  if (auto v = doc.get_uint("seed")) c.master_seed = *v;
  if (auto v = doc.get_int("threads")) c.threads = static_cast<int>(*v);
  const auto sl = doc.get_doubles("sweep_sigma_left");
  const auto sr = doc.get_doubles("sweep_sigma_right");
  if (sl || sr) {
    SweepSpec spec = c.sweep ? *c.sweep : default_sweep_spec();
    if (sl) spec.sigma_left_values = *sl;
    if (sr) spec.sigma_right_values = *sr;
    c.sweep = spec;
  }
}

// Raw CLI flag values; only flags the user actually passed are applied.
struct FlagValues {
  int agents = 0;
  long episodes = 0;
  double alpha = 0, gamma = 0, epsilon0 = 0, epsilon_decay = 0;
  std::string epsilon_decay_form, q_target;
  double mu_left = 0, sigma_left = 0, mu_right = 0, sigma_right = 0;
  std::string noiser;
  double uniform_sigma = 0;
  int bins = 0;
  long calibration_steps = 0;
  std::string binning;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir;
  std::string config_path;
  std::vector<double> sweep_sigma_left, sweep_sigma_right;
};

void add_common_flags(CLI::App* cmd, FlagValues& f) {
  cmd->add_option("--agents", f.agents, "Number of independent agents");
  cmd->add_option("--episodes", f.episodes, "Episodes (arm pulls) per agent");
  cmd->add_option("--alpha", f.alpha, "Learning rate in (0,1]");
  cmd->add_option("--gamma", f.gamma, "Discount factor in [0,1)");
  cmd->add_option("--epsilon0", f.epsilon0, "Initial exploration rate");
  cmd->add_option("--epsilon-decay", f.epsilon_decay,
                  "Per-episode exploration decay rate");
  cmd->add_option("--epsilon-decay-form", f.epsilon_decay_form,
                  "multiplicative|linear|exponential");
  cmd->add_option("--q-target", f.q_target,
                  "Q update continuation: terminal|table_max");
  cmd->add_option("--mu-left", f.mu_left, "Left arm reward mean");
  cmd->add_option("--sigma-left", f.sigma_left, "Left arm reward std");
  cmd->add_option("--mu-right", f.mu_right, "Right arm reward mean");
  cmd->add_option("--sigma-right", f.sigma_right, "Right arm reward std");
  cmd->add_option("--noiser", f.noiser, "Reward noising: off|asrn|uniform");
  cmd->add_option("--uniform-sigma", f.uniform_sigma,
                  "Sigma for the uniform noising mode");
  cmd->add_option("--bins", f.bins, "ASRN bin count");
  cmd->add_option("--calibration-steps", f.calibration_steps,
                  "ASRN calibration length");
  cmd->add_option("--binning", f.binning,
                  "ASRN binning: quantile|equal_width");
  cmd->add_option("--seed", f.seed, "Master seed (replays the whole run)");
  cmd->add_option("--threads", f.threads,
                  "Worker threads (never changes results)");
  cmd->add_option("--out", f.out_dir, "Output directory");
  cmd->add_option("--config", f.config_path,
                  "key=value config file (flags override file values)");
}

void apply_flags(const CLI::App* cmd, const FlagValues& f,
                 ExperimentConfig& c) {
  auto given = [cmd](const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--agents")) c.num_agents = f.agents;
  if (given("--episodes")) c.num_episodes = f.episodes;
  if (given("--alpha")) c.agent.alpha = f.alpha;
  if (given("--gamma")) c.agent.gamma = f.gamma;
  if (given("--epsilon0")) c.agent.epsilon0 = f.epsilon0;
  if (given("--epsilon-decay")) c.agent.epsilon_decay_rate = f.epsilon_decay;
  if (given("--epsilon-decay-form"))
    c.agent.decay_form = parse_decay(f.epsilon_decay_form);
  if (given("--q-target")) c.agent.q_target = parse_target(f.q_target);
  if (given("--mu-left")) c.arms[0].mean = f.mu_left;
  if (given("--sigma-left")) c.arms[0].std = f.sigma_left;
  if (given("--mu-right")) c.arms[1].mean = f.mu_right;
  if (given("--sigma-right")) c.arms[1].std = f.sigma_right;
  if (given("--noiser")) c.noiser.kind = parse_noiser(f.noiser);
  if (given("--uniform-sigma")) c.noiser.uniform_sigma = f.uniform_sigma;
  if (given("--bins")) c.noiser.asrn.num_bins = f.bins;
  if (given("--calibration-steps"))
    c.noiser.asrn.calibration_steps = f.calibration_steps;
  if (given("--binning")) c.noiser.asrn.binning = parse_binning(f.binning);
  if (given("--seed")) c.master_seed = f.seed;
  if (given("--threads")) c.threads = f.threads;
  if (given("--sweep-sigma-left") || given("--sweep-sigma-right")) {
    SweepSpec spec = c.sweep ? *c.sweep : default_sweep_spec();
    if (given("--sweep-sigma-left"))
      spec.sigma_left_values = f.sweep_sigma_left;
    if (given("--sweep-sigma-right"))
      spec.sigma_right_values = f.sweep_sigma_right;
    c.sweep = spec;
  }
}

ExperimentConfig resolve_config(const CLI::App* cmd, const FlagValues& f,
                                ExperimentConfig defaults) {
  ExperimentConfig config = std::move(defaults);
  if (!f.config_path.empty()) {
    apply_kv(KvDoc::parse(read_file(f.config_path)), config);
  }
  apply_flags(cmd, f, config);
  return config;
}

// ----- per-subcommand default configs ---------------------------------

ExperimentConfig broken_bandit_defaults() {
  ExperimentConfig c;
  c.arms = {{0.0, 0.0}, {1.0, 2.5}};
  c.num_agents = 100;
  c.num_episodes = 10000;
  c.agent = {.alpha = 0.05, .gamma = 0.95, .epsilon0 = 1.0,
             .epsilon_decay_rate = 0.001,
             .decay_form = EpsilonDecay::linear,
             .q_target = QTarget::terminal};
  c.noiser = NoiserMode::off();
  return c;
}

ExperimentConfig trace_defaults() {
  ExperimentConfig c;
  c.arms = {{0.0, 0.5}, {1.0, 7.0}};
  c.num_agents = 1;
  c.num_episodes = 10000;
  c.agent = {.alpha = 0.1, .gamma = 0.9, .epsilon0 = 0.0,
             .epsilon_decay_rate = 0.001,
             .decay_form = EpsilonDecay::multiplicative,
             .q_target = QTarget::terminal};
  c.noiser = NoiserMode::off();
  return c;
}

ExperimentConfig sweep_defaults() {
  ExperimentConfig c;
  c.arms = {{0.0, 0.0}, {1.0, 2.5}};
  c.num_agents = 50;
  c.num_episodes = 10000;
  c.agent = {.alpha = 0.1, .gamma = 0.9, .epsilon0 = 0.0,
             .epsilon_decay_rate = 0.001,
             .decay_form = EpsilonDecay::multiplicative,
             .q_target = QTarget::terminal};
  c.noiser = NoiserMode::off();
  c.sweep = default_sweep_spec();
  return c;
}

ExperimentConfig noise_table_defaults() {
  ExperimentConfig c = broken_bandit_defaults();
  c.num_agents = 1;
  c.noiser = NoiserMode::with_asrn({});
  return c;
}

// ----- output helpers --------------------------------------------------

std::filesystem::path prepare_out_dir(const FlagValues& f,
                                      const std::string& fallback) {
  const std::filesystem::path dir =
      f.out_dir.empty() ? std::filesystem::path(fallback)
                        : std::filesystem::path(f.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_resolved_config(const std::filesystem::path& dir,
                           const ExperimentConfig& config) {
  const std::string text = config_to_kv(config).serialize();
  write_file_atomic((dir / "resolved_config.txt").string(), text);
  std::fputs("# resolved config\n", stdout);
  std::fputs(text.c_str(), stdout);
}

long count_events(const std::vector<TrapEvent>& events, TrapEventKind kind) {
  long n = 0;
  for (const auto& e : events) n += (e.kind == kind);
  return n;
}

std::string human_noise_table(const NoiseTable& table) {
  std::ostringstream out;
  out << "bin  upsilon_range                     S_b          N_b\n";
  for (std::size_t b = 0; b < table.num_bins(); ++b) {
    const std::string lo = b == 0 ? "-inf" : format_double(table.edges[b - 1]);
    const std::string hi = b + 1 == table.num_bins()
                               ? "+inf"
                               : format_double(table.edges[b]);
    out << b << "    [" << lo << ", " << hi << ")    "
        << format_double(table.bin_std[b]) << "    "
        << format_double(table.bin_noise[b]) << '\n';
  }
  out << "s_max = " << format_double(table.s_max) << '\n';
  return out.str();
}

int run_population_command(const CLI::App* cmd, const FlagValues& flags) {
  const ExperimentConfig config =
      resolve_config(cmd, flags, broken_bandit_defaults());
  validate(config);
  const auto dir = prepare_out_dir(flags, "broken-bandit-out");
  write_resolved_config(dir, config);

  const RunLog log = run_population(config);

  std::ostringstream steps, success, upsilon;
  write_steps_csv(steps, log);
  write_success_csv(success, log);
  write_upsilon_csv(upsilon, log);
  write_file_atomic((dir / "steps.csv").string(), steps.str());
  write_file_atomic((dir / "success_fraction.csv").string(), success.str());
  write_file_atomic((dir / "mean_upsilon.csv").string(), upsilon.str());

  long enters = 0, exits = 0;
  for (const auto& records : log.agents) {
    const auto events = detect_trap_events(records);
    enters += count_events(events, TrapEventKind::enter);
    exits += count_events(events, TrapEventKind::exit);
  }

  KvDoc summary;
  summary.set("subcommand", "broken-bandit");
  summary.set_uint("seed", config.master_seed);
  summary.set_double("final_success_fraction",
                     success_fraction(log, config.num_episodes - 1));
  summary.set_int("trap_enter_count", enters);
  summary.set_int("trap_exit_count", exits);

  if (config.noiser.kind == NoiserMode::Kind::asrn) {
    const NoiseTable table = calibrate_noise_table(config);
    write_file_atomic((dir / "noise_table.txt").string(),
                      write_noise_table(table));
    summary.set("noise_table_file", "noise_table.txt");
    summary.set_double("noise_table_s_max", table.s_max);
  }
  write_file_atomic((dir / "summary.txt").string(), summary.serialize());
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int run_trace_command(const CLI::App* cmd, const FlagValues& flags) {
  const ExperimentConfig config = resolve_config(cmd, flags, trace_defaults());
  validate(config);
  const auto dir = prepare_out_dir(flags, "trace-out");
  write_resolved_config(dir, config);

  const TraceResult result = run_single_trace(config);

  std::ostringstream steps, events;
  write_steps_csv(steps, result.log);
  write_trap_events_csv(events, result.events);
  write_file_atomic((dir / "steps.csv").string(), steps.str());
  write_file_atomic((dir / "trap_events.csv").string(), events.str());

  KvDoc summary;
  summary.set("subcommand", "trace");
  summary.set_uint("seed", config.master_seed);
  summary.set_int("trap_enter_count",
                  count_events(result.events, TrapEventKind::enter));
  summary.set_int("trap_exit_count",
                  count_events(result.events, TrapEventKind::exit));
  summary.set_double("final_q_left",
                     result.log.agents[0].back().q_values[0]);
  summary.set_double("final_q_right",
                     result.log.agents[0].back().q_values[1]);
  write_file_atomic((dir / "summary.txt").string(), summary.serialize());
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int run_sweep_command(const CLI::App* cmd, const FlagValues& flags) {
  const ExperimentConfig config = resolve_config(cmd, flags, sweep_defaults());
  validate(config);
  const auto dir = prepare_out_dir(flags, "sweep-out");
  write_resolved_config(dir, config);

  const std::vector<SweepCell> grid = run_variance_sweep(config);

  std::ostringstream csv;
  csv << "sigma_left,sigma_right,num_success,num_agents\n";
  long total_success = 0;
  for (const SweepCell& cell : grid) {
    csv << format_double(cell.sigma_left) << ','
        << format_double(cell.sigma_right) << ',' << cell.num_success << ','
        << cell.num_agents << '\n';
    total_success += cell.num_success;
  }
  write_file_atomic((dir / "sweep.csv").string(), csv.str());

  KvDoc summary;
  summary.set("subcommand", "sweep");
  summary.set_uint("seed", config.master_seed);
  summary.set_int("cells", static_cast<long>(grid.size()));
  summary.set_int("total_success", total_success);
  summary.set_int("agents_per_cell", config.num_agents);
  write_file_atomic((dir / "summary.txt").string(), summary.serialize());
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int run_noise_table_command(const CLI::App* cmd, const FlagValues& flags) {
  ExperimentConfig config =
      resolve_config(cmd, flags, noise_table_defaults());
  config.noiser.kind = NoiserMode::Kind::asrn;  // this command is ASRN-only
  validate(config);
  const auto dir = prepare_out_dir(flags, "noise-table-out");
  write_resolved_config(dir, config);

  const NoiseTable table = calibrate_noise_table(config);
  write_file_atomic((dir / "noise_table.txt").string(),
                    write_noise_table(table));
  write_file_atomic((dir / "noise_table_summary.txt").string(),
                    human_noise_table(table));

  KvDoc summary;
  summary.set("subcommand", "noise-table");
  summary.set_uint("seed", config.master_seed);
  summary.set_int("bins", static_cast<long>(table.num_bins()));
  summary.set_double("s_max", table.s_max);
  write_file_atomic((dir / "summary.txt").string(), summary.serialize());
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-difference bandit lab: Q-learning agents, the "
               "Boring-Areas-Trap experiments and adaptive symmetric "
               "reward noising"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  FlagValues flags;
  CLI::App* broken = app.add_subcommand(
      "broken-bandit", "Population run on the broken-armed bandit");
  CLI::App* trace = app.add_subcommand(
      "trace", "Single-agent greedy trace with trap events");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Success counts over a (sigma_left, sigma_right) grid");
  CLI::App* noise_table = app.add_subcommand(
      "noise-table", "Run ASRN calibration only and dump the noise table");
  for (CLI::App* cmd : {broken, trace, sweep, noise_table}) {
    add_common_flags(cmd, flags);
  }
  sweep->add_option("--sweep-sigma-left", flags.sweep_sigma_left,
                    "Explicit sigma_left grid values");
  sweep->add_option("--sweep-sigma-right", flags.sweep_sigma_right,
                    "Explicit sigma_right grid values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (broken->parsed()) return run_population_command(broken, flags);
    if (trace->parsed()) return run_trace_command(trace, flags);
    if (sweep->parsed()) return run_sweep_command(sweep, flags);
    if (noise_table->parsed())
      return run_noise_table_command(noise_table, flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const CalibrationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
