#include "asrnlab/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asrnlab/errors.hpp"

namespace asrnlab {

void validate(const AgentConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
    throw ConfigError("alpha must be in (0, 1]");
  }
  if (!(config.gamma >= 0.0 && config.gamma < 1.0)) {
    throw ConfigError("gamma must be in [0, 1)");
  }
  if (!(config.epsilon0 >= 0.0 && config.epsilon0 <= 1.0)) {
    throw ConfigError("epsilon0 must be in [0, 1]");
  }
  if (!(config.epsilon_decay_rate >= 0.0) ||
      !std::isfinite(config.epsilon_decay_rate)) {
    throw ConfigError("epsilon_decay_rate must be finite and >= 0");
  }
}

QTable init_optimal(const std::vector<double>& arm_means, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidDiscountError(
        "optimal-value initialization needs 0 <= gamma < 1, got " +
        std::to_string(gamma));
  }
  QTable values(arm_means.size());
  for (std::size_t a = 0; a < arm_means.size(); ++a) {
    values[a] = arm_means[a] / (1.0 - gamma);
  }
  return values;
}

namespace {

double table_max_value(const QTable& qtable) {
  return *std::max_element(qtable.begin(), qtable.end());
}

double update_target(const QTable& qtable, double reward, double gamma,
                     QTarget target) {
  if (target == QTarget::table_max) {
    return reward + gamma * table_max_value(qtable);
  }
  return reward;
}

}  // namespace

std::size_t select_action(const QTable& qtable, double epsilon,
                          RandomStream& rng) {
  // Fixed two-draw discipline: one explore decision, one index draw.
  const double u = rng.next_unit();
  if (u < epsilon) {
    return rng.next_below(static_cast<std::uint32_t>(qtable.size()));
  }
  const double best = table_max_value(qtable);
  std::uint32_t num_best = 0;
  for (double v : qtable) num_best += (v == best);
  std::uint32_t pick = rng.next_below(num_best);
  for (std::size_t a = 0; a < qtable.size(); ++a) {
    if (qtable[a] == best && pick-- == 0) return a;
  }
  return qtable.size() - 1;  // unreachable
}

double would_be_update(const QTable& qtable, std::size_t action,
                       double reward, double alpha, double gamma,
                       QTarget target) {
  if (action >= qtable.size()) {
    throw InvalidActionError("action " + std::to_string(action) +
                             " out of range");
  }
  const double old_value = qtable[action];
  const double new_value =
      (1.0 - alpha) * old_value +
      alpha * update_target(qtable, reward, gamma, target);
  return std::abs(new_value - old_value);
}

double q_update(QTable& qtable, std::size_t action, double reward,
                double alpha, double gamma, QTarget target) {
  if (action >= qtable.size()) {
    throw InvalidActionError("action " + std::to_string(action) +
                             " out of range");
  }
  const double old_value = qtable[action];
  const double new_value =
      (1.0 - alpha) * old_value +
      alpha * update_target(qtable, reward, gamma, target);
  qtable[action] = new_value;
  return std::abs(new_value - old_value);
}

void decay_epsilon(AgentState& state, const AgentConfig& config) {
  const double rate = config.epsilon_decay_rate;
  double next = state.epsilon;
  switch (config.decay_form) {
    case EpsilonDecay::multiplicative:
      next = state.epsilon * (1.0 - rate);
      break;
    case EpsilonDecay::linear:
      next = state.epsilon - rate;
      break;
    case EpsilonDecay::exponential:
      next = state.epsilon * std::exp(-rate);
      break;
  }
  state.epsilon = std::max(0.0, next);
  state.episode += 1;
}

}  // namespace asrnlab
