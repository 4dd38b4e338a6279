#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace asrnlab {

/// One agent-environment interaction, recorded after the update.
struct StepRecord {
  long episode = 0;
  int agent_id = 0;
  int action = 0;
  double raw_reward = 0.0;     // reward drawn from the arm
  double noised_reward = 0.0;  // reward the learner actually consumed
  double upsilon = 0.0;        // realized update magnitude |Q_new - Q_old|
  double epsilon = 0.0;        // exploration rate when the action was chosen
  std::vector<double> q_values;  // post-update snapshot (left, right, ...)
};

/// Episode-ordered per-agent logs; one record per (agent, episode).
struct RunLog {
  std::vector<std::vector<StepRecord>> agents;

  std::size_t num_agents() const noexcept { return agents.size(); }
  /// Episodes of the first agent (all agents record the same range).
  long num_episodes() const noexcept {
    return agents.empty() ? 0 : static_cast<long>(agents.front().size());
  }
};

/// Trailing moving average: out[t] = mean(series[max(0, t-k+1) .. t]).
/// Length-preserving and causal. Throws ConfigError for kernel_len == 0.
std::vector<double> smooth(const std::vector<double>& series,
                           std::size_t kernel_len);

/// Fraction of agents whose greedy arm at the episode is the right arm
/// (index 1); an agent whose right-arm value ties the maximum with another
/// arm counts 0.5. Throws RangeError when the log is empty or the episode
/// is missing from any agent.
double success_fraction(const RunLog& log, long episode);

/// Mean realized update magnitude at one episode, split by the arm
/// actually pulled. A side nobody pulled is absent, never zero.
struct GroupedUpsilon {
  std::optional<double> mean_right;
  std::optional<double> mean_left;
};
GroupedUpsilon grouped_mean_upsilon(const RunLog& log, long episode);

enum class TrapEventKind { enter, exit };

struct TrapEvent {
  long episode = 0;
  TrapEventKind kind = TrapEventKind::enter;
};

/// Greedy-preference flips of one agent's log: `enter` when the ordering
/// flips to Q_left > Q_right, `exit` when it flips back. Starting from an
/// optimal initialization with mu_right > mu_left the events alternate
/// beginning with `enter`.
std::vector<TrapEvent> detect_trap_events(std::span<const StepRecord> log);

/// Per-step CSV. Columns:
///   agent_id,episode,action,raw_reward,noised_reward,upsilon,epsilon,q_left,q_right
/// Rows ordered by agent, then episode. Doubles use shortest round-trip
/// formatting, so identical runs serialize byte-identically.
void write_steps_csv(std::ostream& out, const RunLog& log);

/// Aggregate CSV: episode,success_fraction.
void write_success_csv(std::ostream& out, const RunLog& log);

/// Aggregate CSV: episode,mean_upsilon_right,mean_upsilon_left; an absent
/// group leaves its cell empty.
void write_upsilon_csv(std::ostream& out, const RunLog& log);

/// Trap events CSV: episode,kind.
void write_trap_events_csv(std::ostream& out,
                           const std::vector<TrapEvent>& events);

}  // namespace asrnlab
