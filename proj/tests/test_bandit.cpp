#include <doctest.h>

#include <cmath>
#include <vector>

#include "asrnlab/bandit.hpp"
#include "asrnlab/errors.hpp"

using namespace asrnlab;

TEST_CASE("broken left arm pays exactly zero, every pull") {
  const BanditEnv env({{0.0, 0.0}, {1.0, 2.5}});
  RandomStream rng(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(env.pull(BanditEnv::kLeft, rng) == 0.0);
  }
}

TEST_CASE("any zero-variance arm pays its mean exactly") {
  const BanditEnv env({{-3.5, 0.0}, {1.0, 1.0}});
  RandomStream rng(2);
  for (int i = 0; i < 100; ++i) {
    CHECK(env.pull(0, rng) == -3.5);
  }
}

TEST_CASE("seeded right-arm draws have the configured moments") {
  const BanditEnv env({{0.0, 0.0}, {1.0, 2.5}});
  RandomStream rng(derive_seed(7, 0, 1));
  const long n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double r = env.pull(BanditEnv::kRight, rng);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / n;
  const double stdev = std::sqrt(sum_sq / n - mean * mean);
  CHECK(mean > 0.97);   // 4 sigma / sqrt(n) ~ 0.0316
  CHECK(mean < 1.03);
  CHECK(std::abs(stdev - 2.5) < 5.0 * 2.5 / std::sqrt(2.0 * n));
}

TEST_CASE("identical seeds replay the same reward sequence") {
  const BanditEnv env({{0.0, 1.0}, {1.0, 2.5}});
  RandomStream a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    CHECK(env.pull(1, a) == env.pull(1, b));
  }
}

TEST_CASE("out-of-range arm index raises") {
  const BanditEnv env({{0.0, 0.0}, {1.0, 2.5}});
  RandomStream rng(1);
  CHECK_THROWS_AS((void)env.pull(2, rng), InvalidActionError);
}

TEST_CASE("environment construction validates arms") {
  CHECK_THROWS_AS(BanditEnv({{0.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(BanditEnv({{0.0, -1.0}, {1.0, 1.0}}), ConfigError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(BanditEnv({{inf, 1.0}, {1.0, 1.0}}), ConfigError);
}

TEST_CASE("environments generalize beyond two arms") {
  const BanditEnv env({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}});
  RandomStream rng(3);
  CHECK(env.pull(2, rng) == 2.0);
  CHECK(env.num_arms() == 3);
}
