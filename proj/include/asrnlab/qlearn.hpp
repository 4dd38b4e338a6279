#pragma once

#include <cstddef>
#include <vector>

#include "asrnlab/random.hpp"

namespace asrnlab {

/// Per-action value estimates for the single-state agent.
using QTable = std::vector<double>;

/// Continuation term used in the Q update target.
///   table_max: target = r + gamma * max_a Q(a)   (single-state reading,
///              the table bootstraps on itself)
///   terminal:  target = r                        (every pull ends the
///              episode, no continuation)
enum class QTarget { table_max, terminal };

/// Per-episode exploration decay form. multiplicative is the default;
/// linear reaches exactly zero after epsilon0/rate episodes.
enum class EpsilonDecay { multiplicative, linear, exponential };

struct AgentConfig {
  double alpha = 0.05;               // learning rate, (0, 1]
  double gamma = 0.95;               // discount, [0, 1)
  double epsilon0 = 1.0;             // initial exploration rate, [0, 1]
  double epsilon_decay_rate = 0.001; // per-episode decay, >= 0
  EpsilonDecay decay_form = EpsilonDecay::multiplicative;
  QTarget q_target = QTarget::table_max;
};

/// Throws ConfigError if any field is out of range.
void validate(const AgentConfig& config);

struct AgentState {
  QTable qtable;
  double epsilon = 0.0;
  long episode = 0;
};

/// Optimal-value initialization: Q[a] = mean[a] / (1 - gamma), the
/// discounted sum of repeatedly collecting that arm's mean reward.
/// Throws InvalidDiscountError for gamma outside [0, 1).
QTable init_optimal(const std::vector<double>& arm_means, double gamma);

/// Epsilon-greedy action choice: with probability epsilon a uniformly
/// random arm, otherwise the argmax with uniform tie-breaking among
/// maxima. Consumes exactly two draws from rng per call.
std::size_t select_action(const QTable& qtable, double epsilon,
                          RandomStream& rng);

/// Update magnitude |Q_new(a) - Q_old(a)| the update WOULD produce,
/// without touching the table. Used to route a reward to its noise bin
/// before the (possibly noised) update is applied.
double would_be_update(const QTable& qtable, std::size_t action,
                       double reward, double alpha, double gamma,
                       QTarget target = QTarget::table_max);

/// One Q-learning step on the chosen action:
///   Q(a) <- (1 - alpha) * Q(a) + alpha * target
/// with target = reward + gamma * max_a Q_old(a) under table_max, and
/// target = reward under terminal. Only values[action] changes. Returns
/// the realized update magnitude upsilon = |Q_new(a) - Q_old(a)|.
double q_update(QTable& qtable, std::size_t action, double reward,
                double alpha, double gamma,
                QTarget target = QTarget::table_max);

/// Applies one episode of exploration decay, clamped at 0.
void decay_epsilon(AgentState& state, const AgentConfig& config);

}  // namespace asrnlab
