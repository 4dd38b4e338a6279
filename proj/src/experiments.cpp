#include "asrnlab/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "asrnlab/errors.hpp"

namespace asrnlab {

namespace {

constexpr std::uint64_t kSweepTag = 0x73776565;  // distinguishes cell streams

/// Runs fn(0..num_tasks) across up to max_threads workers. Tasks must
/// write to disjoint slots; the first exception is rethrown after join.
void parallel_for(int num_tasks, int max_threads,
                  const std::function<void(int)>& fn) {
  if (max_threads <= 1 || num_tasks <= 1) {
    for (int i = 0; i < num_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= num_tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int n = std::min(max_threads, num_tasks);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> arm_means(const std::vector<ArmSpec>& arms) {
  std::vector<double> means;
  means.reserve(arms.size());
  for (const ArmSpec& a : arms) means.push_back(a.mean);
  return means;
}

/// One agent's full trajectory. `emit` receives every post-update record;
/// summarizing callers pass a sink that only keeps what they need.
template <class Emit>
void run_one_agent(const BanditEnv& env, const ExperimentConfig& config,
                   std::uint64_t stream_seed, int agent_id, Emit&& emit) {
  auto env_rng = make_agent_stream(stream_seed, agent_id,
                                   StreamPurpose::environment);
  auto action_rng =
      make_agent_stream(stream_seed, agent_id, StreamPurpose::action);
  auto noise_rng =
      make_agent_stream(stream_seed, agent_id, StreamPurpose::noise);

  const AgentConfig& ac = config.agent;
  AgentState state;
  state.qtable = init_optimal(arm_means(env.arms()), ac.gamma);
  state.epsilon = ac.epsilon0;
  Noiser noiser(config.noiser);

  StepRecord rec;
  rec.agent_id = agent_id;
  for (long t = 0; t < config.num_episodes; ++t) {
    const std::size_t action = select_action(state.qtable, state.epsilon,
                                             action_rng);
    const double raw = env.pull(action, env_rng);
    // The raw reward's would-be update magnitude routes it to a bin; the
    // noised reward then drives the actual update.
    const double routing_upsilon = would_be_update(
        state.qtable, action, raw, ac.alpha, ac.gamma, ac.q_target);
    const double noised = noiser.process(raw, routing_upsilon, noise_rng);
    const double upsilon = q_update(state.qtable, action, noised, ac.alpha,
                                    ac.gamma, ac.q_target);

    rec.episode = t;
    rec.action = static_cast<int>(action);
    rec.raw_reward = raw;
    rec.noised_reward = noised;
    rec.upsilon = upsilon;
    rec.epsilon = state.epsilon;
    rec.q_values = state.qtable;
    emit(rec, state);
    decay_epsilon(state, ac);
  }
}

void validate_common(const ExperimentConfig& config) {
  if (config.arms.size() < 2) {
    throw ConfigError("experiment needs at least 2 arms");
  }
  for (const ArmSpec& a : config.arms) {
    if (!std::isfinite(a.mean) || !std::isfinite(a.std) || a.std < 0.0) {
      throw ConfigError("arms need finite means and std >= 0");
    }
  }
  if (config.num_agents < 1) throw ConfigError("num_agents must be >= 1");
  if (config.num_episodes < 1) throw ConfigError("num_episodes must be >= 1");
  if (config.threads < 1) throw ConfigError("threads must be >= 1");
  validate(config.agent);
  if (config.noiser.kind == NoiserMode::Kind::asrn) {
    validate(config.noiser.asrn);
    if (config.noiser.asrn.calibration_steps > config.num_episodes) {
      throw ConfigError("calibration_steps exceeds num_episodes");
    }
  }
  if (config.noiser.kind == NoiserMode::Kind::uniform &&
      (!(config.noiser.uniform_sigma >= 0.0) ||
       !std::isfinite(config.noiser.uniform_sigma))) {
    throw ConfigError("uniform noise sigma must be finite and >= 0");
  }
}

}  // namespace

void validate(const ExperimentConfig& config) {
  validate_common(config);
  if (config.sweep) {
    if (config.sweep->sigma_left_values.empty() ||
        config.sweep->sigma_right_values.empty()) {
      throw ConfigError("sweep sigma grids must be non-empty");
    }
    for (double s : config.sweep->sigma_left_values) {
      if (!std::isfinite(s) || s < 0.0) {
        throw ConfigError("sweep sigma_left values must be finite and >= 0");
      }
    }
    for (double s : config.sweep->sigma_right_values) {
      if (!std::isfinite(s) || s < 0.0) {
        throw ConfigError("sweep sigma_right values must be finite and >= 0");
      }
    }
  }
}

RunLog run_population(const ExperimentConfig& config) {
  validate_common(config);
  const BanditEnv env(config.arms);

  RunLog log;
  log.agents.resize(static_cast<std::size_t>(config.num_agents));
  parallel_for(config.num_agents, config.threads, [&](int agent_id) {
    auto& records = log.agents[static_cast<std::size_t>(agent_id)];
    records.reserve(static_cast<std::size_t>(config.num_episodes));
    run_one_agent(env, config, config.master_seed, agent_id,
                  [&records](const StepRecord& rec, const AgentState&) {
                    records.push_back(rec);
                  });
  });
  return log;
}

TraceResult run_single_trace(const ExperimentConfig& config) {
  if (config.num_agents != 1) {
    throw ConfigError("trace runs require num_agents == 1");
  }
  if (config.agent.epsilon0 != 0.0) {
    throw ConfigError("trace runs require epsilon0 == 0 (pure greedy)");
  }
  TraceResult result;
  result.log = run_population(config);
  result.events = detect_trap_events(result.log.agents.front());
  return result;
}

std::vector<SweepCell> run_variance_sweep(const ExperimentConfig& config) {
  validate(config);
  if (!config.sweep) {
    throw ConfigError("sweep run requires a sweep grid");
  }
  const auto& lefts = config.sweep->sigma_left_values;
  const auto& rights = config.sweep->sigma_right_values;
  const int cells = static_cast<int>(lefts.size() * rights.size());

  std::vector<SweepCell> grid(static_cast<std::size_t>(cells));
  parallel_for(cells, config.threads, [&](int cell) {
    const std::size_t li = static_cast<std::size_t>(cell) / rights.size();
    const std::size_t ri = static_cast<std::size_t>(cell) % rights.size();

    ExperimentConfig cell_config = config;
    cell_config.sweep.reset();
    cell_config.threads = 1;
    cell_config.arms[0].std = lefts[li];
    cell_config.arms[1].std = rights[ri];

    const BanditEnv env(cell_config.arms);
    const std::uint64_t cell_seed =
        derive_seed(config.master_seed, kSweepTag, li, ri);

    SweepCell& out = grid[static_cast<std::size_t>(cell)];
    out.sigma_left = lefts[li];
    out.sigma_right = rights[ri];
    out.num_agents = config.num_agents;
    for (int agent = 0; agent < config.num_agents; ++agent) {
      QTable final_q;
      run_one_agent(env, cell_config, cell_seed, agent,
                    [&final_q](const StepRecord&, const AgentState& st) {
                      final_q = st.qtable;
                    });
      bool right_best = true;
      for (std::size_t a = 0; a < final_q.size(); ++a) {
        if (a != 1 && final_q[a] >= final_q[1]) right_best = false;
      }
      out.num_success += right_best;
    }
  });
  return grid;
}

NoiseTable calibrate_noise_table(const ExperimentConfig& config) {
  if (config.noiser.kind != NoiserMode::Kind::asrn) {
    throw ConfigError("noise-table calibration requires the asrn noiser");
  }
  ExperimentConfig calib = config;
  calib.num_agents = 1;
  calib.num_episodes = config.noiser.asrn.calibration_steps;
  validate_common(calib);

  const BanditEnv env(calib.arms);
  const AgentConfig& ac = calib.agent;
  auto env_rng = make_agent_stream(calib.master_seed, 0,
                                   StreamPurpose::environment);
  auto action_rng = make_agent_stream(calib.master_seed, 0,
                                      StreamPurpose::action);
  AgentState state;
  state.qtable = init_optimal(arm_means(calib.arms), ac.gamma);
  state.epsilon = ac.epsilon0;
  CalibrationBuffer buffer(calib.noiser.asrn.calibration_steps);
  for (long t = 0; t < calib.num_episodes; ++t) {
    const std::size_t action =
        select_action(state.qtable, state.epsilon, action_rng);
    const double raw = env.pull(action, env_rng);
    const double upsilon = q_update(state.qtable, action, raw, ac.alpha,
                                    ac.gamma, ac.q_target);
    buffer.observe(upsilon, raw);
    decay_epsilon(state, ac);
  }
  return finalize_calibration(buffer, calib.noiser.asrn);
}

SweepSpec default_sweep_spec() {
  SweepSpec spec;
  for (int i = 0; i <= 20; ++i) spec.sigma_left_values.push_back(0.25 * i);
  for (int i = 1; i <= 20; ++i) spec.sigma_right_values.push_back(0.5 * i);
  return spec;
}

}  // namespace asrnlab
