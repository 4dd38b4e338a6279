#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "asrnlab/asrn.hpp"
#include "asrnlab/bandit.hpp"
#include "asrnlab/qlearn.hpp"
#include "asrnlab/telemetry.hpp"

namespace asrnlab {

/// Grid of arm standard deviations for the variance sweep.
struct SweepSpec {
  std::vector<double> sigma_left_values;
  std::vector<double> sigma_right_values;
};

/// Full parameterization of a run. Per-agent random streams are derived
/// from (master_seed, agent_id, purpose); the master seed alone replays
/// any experiment bit-for-bit, at any thread count.
struct ExperimentConfig {
  std::vector<ArmSpec> arms = {{0.0, 0.0}, {1.0, 2.5}};
  int num_agents = 100;
  long num_episodes = 10000;
  AgentConfig agent;
  NoiserMode noiser;
  std::uint64_t master_seed = 3;
  int threads = 1;
  std::optional<SweepSpec> sweep;
};

/// Throws ConfigError on any invariant violation.
void validate(const ExperimentConfig& config);

/// Runs num_agents independent optimally-initialized agents for
/// num_episodes each and logs every step. Per episode:
/// select -> pull -> noise (per mode) -> update with the noised reward ->
/// decay epsilon. Agents are embarrassingly parallel; config.threads only
/// changes the wall clock, never the result.
RunLog run_population(const ExperimentConfig& config);

struct TraceResult {
  RunLog log;
  std::vector<TrapEvent> events;
};

/// Single-agent greedy trace (requires num_agents == 1 and epsilon0 == 0)
/// with trap enter/exit events extracted from the Q trajectory.
TraceResult run_single_trace(const ExperimentConfig& config);

struct SweepCell {
  double sigma_left = 0.0;
  double sigma_right = 0.0;
  int num_success = 0;  // agents whose greedy arm at the last episode is right
  int num_agents = 0;
};

/// Runs one population per (sigma_left, sigma_right) pair of config.sweep,
/// keeping arm means and all other parameters fixed. Cells are
/// deterministic and independent given master_seed; results are ordered by
/// sigma_left index, then sigma_right index.
std::vector<SweepCell> run_variance_sweep(const ExperimentConfig& config);

/// Runs only the calibration phase of an ASRN experiment (first agent's
/// stream) and returns the finalized noise table.
/// Throws ConfigError unless the config's noiser mode is asrn.
NoiseTable calibrate_noise_table(const ExperimentConfig& config);

/// Default sweep grid: sigma_right 0.5..10 step 0.5, sigma_left 0..5
/// step 0.25.
SweepSpec default_sweep_spec();

}  // namespace asrnlab
