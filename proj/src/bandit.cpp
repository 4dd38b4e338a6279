#include "asrnlab/bandit.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "asrnlab/errors.hpp"

namespace asrnlab {

BanditEnv::BanditEnv(std::vector<ArmSpec> arms) : arms_(std::move(arms)) {
  if (arms_.size() < 2) {
    throw ConfigError("bandit environment needs at least 2 arms, got " +
                      std::to_string(arms_.size()));
  }
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const ArmSpec& a = arms_[i];
    if (!std::isfinite(a.mean) || !std::isfinite(a.std) || a.std < 0.0) {
      throw ConfigError("arm " + std::to_string(i) +
                        " needs a finite mean and std >= 0");
    }
  }
}

const ArmSpec& BanditEnv::arm(std::size_t index) const {
  if (index >= arms_.size()) {
    throw InvalidActionError("arm index " + std::to_string(index) +
                             " out of range [0, " +
                             std::to_string(arms_.size()) + ")");
  }
  return arms_[index];
}

double BanditEnv::pull(std::size_t arm_index, RandomStream& rng) const {
  const ArmSpec& a = arm(arm_index);
  return rng.next_normal(a.mean, a.std);
}

}  // namespace asrnlab
