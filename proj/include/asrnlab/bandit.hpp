#pragma once

#include <cstddef>
#include <vector>

#include "asrnlab/random.hpp"

namespace asrnlab {

/// Gaussian reward distribution of one arm. std == 0 is the degenerate
/// ("broken") arm that pays its mean exactly, every pull.
struct ArmSpec {
  double mean = 0.0;
  double std = 0.0;  // >= 0
};

/// Multi-armed bandit with per-arm Gaussian rewards. Immutable after
/// construction; safe to share read-only across agents. The environment
/// holds no RNG state — each pull consumes from the caller's stream.
///
/// By convention index 0 is the left arm and index 1 the right arm.
class BanditEnv {
 public:
  /// Requires at least two arms with finite means and std >= 0.
  explicit BanditEnv(std::vector<ArmSpec> arms);

  std::size_t num_arms() const noexcept { return arms_.size(); }
  const ArmSpec& arm(std::size_t index) const;
  const std::vector<ArmSpec>& arms() const noexcept { return arms_; }

  /// Samples a reward from the chosen arm's Normal(mean, std^2).
  /// Consumes exactly two draws from rng for std > 0 arms and none for
  /// std == 0 arms (which return mean exactly).
  /// Throws InvalidActionError for an out-of-range arm index.
  double pull(std::size_t arm, RandomStream& rng) const;

  static constexpr std::size_t kLeft = 0;
  static constexpr std::size_t kRight = 1;

 private:
  std::vector<ArmSpec> arms_;
};

}  // namespace asrnlab
