#include <doctest.h>

#include <sstream>

#include "asrnlab/errors.hpp"
#include "asrnlab/experiments.hpp"

using namespace asrnlab;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.arms = {{0.0, 0.0}, {1.0, 2.5}};
  c.num_agents = 4;
  c.num_episodes = 200;
  c.agent = {.alpha = 0.05, .gamma = 0.95, .epsilon0 = 1.0,
             .epsilon_decay_rate = 0.001,
             .decay_form = EpsilonDecay::linear,
             .q_target = QTarget::terminal};
  c.master_seed = 7;
  return c;
}

std::string steps_csv(const RunLog& log) {
  std::ostringstream out;
  write_steps_csv(out, log);
  return out.str();
}

}  // namespace

TEST_CASE("a greedy first step pulls the optimal right arm") {
  ExperimentConfig c = tiny_config();
  c.num_agents = 1;
  c.num_episodes = 1;
  c.agent.epsilon0 = 0.0;
  const RunLog log = run_population(c);
  REQUIRE(log.num_agents() == 1);
  REQUIRE(log.num_episodes() == 1);
  CHECK(log.agents[0][0].action == 1);
  CHECK(log.agents[0][0].episode == 0);
}

TEST_CASE("runs are deterministic and thread-count independent") {
  ExperimentConfig c = tiny_config();
  const RunLog a = run_population(c);
  const RunLog b = run_population(c);
  CHECK(steps_csv(a) == steps_csv(b));

  c.threads = 4;
  const RunLog parallel = run_population(c);
  CHECK(steps_csv(a) == steps_csv(parallel));

  ExperimentConfig other = c;
  other.master_seed = 8;
  CHECK(steps_csv(run_population(other)) != steps_csv(a));
}

TEST_CASE("removing an agent leaves the others' logs identical") {
  ExperimentConfig c = tiny_config();
  const RunLog full = run_population(c);
  c.num_agents = 3;
  const RunLog fewer = run_population(c);
  for (int agent = 0; agent < 3; ++agent) {
    RunLog lhs, rhs;
    lhs.agents = {full.agents[agent]};
    rhs.agents = {fewer.agents[agent]};
    CHECK(steps_csv(lhs) == steps_csv(rhs));
  }
}

TEST_CASE("logged records carry consistent bookkeeping") {
  ExperimentConfig c = tiny_config();
  c.noiser = NoiserMode::with_asrn({.num_bins = 4, .calibration_steps = 50});
  const RunLog log = run_population(c);
  for (const auto& records : log.agents) {
    REQUIRE(records.size() == 200);
    double prev_eps = 1.0;
    for (const auto& rec : records) {
      CHECK(rec.upsilon >= 0.0);
      CHECK(rec.epsilon >= 0.0);
      CHECK(rec.epsilon <= prev_eps);
      CHECK(rec.q_values.size() == 2);
      if (rec.episode < 50) {
        // calibration period passes rewards through un-noised
        CHECK(rec.noised_reward == rec.raw_reward);
      }
      prev_eps = rec.epsilon;
    }
  }
}

TEST_CASE("asrn with an all-zero table reproduces the off trajectories") {
  // The noise stream is separate per purpose, so a degenerate table must
  // not perturb the environment or action draws.
  ExperimentConfig off = tiny_config();
  ExperimentConfig degenerate = tiny_config();
  degenerate.noiser =
      NoiserMode::with_asrn({.num_bins = 2, .calibration_steps = 20});
  // arms (0,0) and (1,2.5): the left arm pays a constant, so post-noise
  // trajectories only match if every visited bin has zero noise. Force it
  // by making both arms deterministic instead.
  off.arms = {{0.0, 0.0}, {1.0, 0.0}};
  degenerate.arms = off.arms;
  const RunLog base = run_population(off);
  const RunLog with_table = run_population(degenerate);
  // deterministic arms -> every bin std is 0 -> all noise levels are 0
  CHECK(steps_csv(base) == steps_csv(with_table));
}

TEST_CASE("uniform noising perturbs rewards from the first episode") {
  ExperimentConfig c = tiny_config();
  c.noiser = NoiserMode::with_uniform(0.1);
  const RunLog log = run_population(c);
  long noised = 0, total = 0;
  for (const auto& records : log.agents) {
    for (const auto& rec : records) {
      noised += rec.noised_reward != rec.raw_reward;
      ++total;
    }
  }
  CHECK(total == 800);
  CHECK(noised > 790);  // no calibration phase, every reward is noised
}

TEST_CASE("trace runs require a single greedy agent") {
  ExperimentConfig c = tiny_config();
  c.num_agents = 1;
  c.agent.epsilon0 = 0.0;
  c.arms = {{0.0, 0.5}, {1.0, 7.0}};
  c.agent.alpha = 0.1;
  c.agent.gamma = 0.9;
  CHECK_NOTHROW(run_single_trace(c));

  ExperimentConfig bad = c;
  bad.num_agents = 2;
  CHECK_THROWS_AS(run_single_trace(bad), ConfigError);
  bad = c;
  bad.agent.epsilon0 = 0.5;
  CHECK_THROWS_AS(run_single_trace(bad), ConfigError);
}

TEST_CASE("deterministic arms with optimal init never trap") {
  ExperimentConfig c = tiny_config();
  c.num_agents = 1;
  c.num_episodes = 5000;
  c.agent.epsilon0 = 0.0;
  c.arms = {{0.0, 0.0}, {1.0, 0.0}};  // both arms deterministic
  const TraceResult result = run_single_trace(c);
  CHECK(result.events.empty());
  for (const auto& rec : result.log.agents[0]) {
    CHECK(rec.action == 1);
  }
}

TEST_CASE("a trapped broken-arm agent with negative q_right never exits") {
  // With sigma_left = 0 the trapped value decays toward zero from above
  // and can never cross a negative frozen q_right. Oracle: iterate the
  // recurrence alongside the real run.
  ExperimentConfig c = tiny_config();
  c.num_agents = 1;
  c.num_episodes = 20000;
  c.agent.epsilon0 = 0.0;
  c.agent.q_target = QTarget::table_max;
  const RunLog log = run_population(c);  // greedy right forever here
  // build the trapped scenario directly on the kernel instead:
  QTable q{0.5, -0.2};  // entered the trap with q_right < 0
  double oracle = q[0];
  const double factor = 1.0 - c.agent.alpha + c.agent.alpha * c.agent.gamma;
  for (int t = 0; t < 20000; ++t) {
    q_update(q, 0, 0.0, c.agent.alpha, c.agent.gamma, QTarget::table_max);
    oracle *= factor;
    REQUIRE(q[0] == doctest::Approx(oracle).epsilon(1e-9));
    REQUIRE(q[0] > q[1]);  // never exits
  }
  CHECK(log.num_episodes() == 20000);
}

TEST_CASE("variance sweep covers the grid deterministically") {
  ExperimentConfig c = tiny_config();
  c.num_agents = 5;
  c.num_episodes = 300;
  c.agent = {.alpha = 0.1, .gamma = 0.9, .epsilon0 = 0.0,
             .epsilon_decay_rate = 0.001,
             .decay_form = EpsilonDecay::multiplicative,
             .q_target = QTarget::terminal};
  c.sweep = SweepSpec{{0.0, 1.0}, {0.5, 1.0, 2.0}};
  const auto grid = run_variance_sweep(c);
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].sigma_left == 0.0);
  CHECK(grid[0].sigma_right == 0.5);
  CHECK(grid[5].sigma_left == 1.0);
  CHECK(grid[5].sigma_right == 2.0);
  for (const auto& cell : grid) {
    CHECK(cell.num_agents == 5);
    CHECK(cell.num_success >= 0);
    CHECK(cell.num_success <= 5);
  }

  ExperimentConfig parallel = c;
  parallel.threads = 4;
  const auto grid2 = run_variance_sweep(parallel);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(grid[i].num_success == grid2[i].num_success);
  }

  SUBCASE("both arms deterministic keeps every agent on the right arm") {
    c.sweep = SweepSpec{{0.0}, {0.0}};
    // replace the degenerate sigma on the right arm too
    const auto fixed = run_variance_sweep(c);
    REQUIRE(fixed.size() == 1);
    CHECK(fixed[0].num_success == 5);
  }
  SUBCASE("sweep without a grid is rejected") {
    c.sweep.reset();
    CHECK_THROWS_AS(run_variance_sweep(c), ConfigError);
  }
}

TEST_CASE("config validation rejects bad experiment setups") {
  ExperimentConfig c = tiny_config();
  c.num_agents = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = tiny_config();
  c.agent.alpha = 2.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = tiny_config();
  c.noiser = NoiserMode::with_asrn({.num_bins = 10, .calibration_steps = 5});
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = tiny_config();
  c.noiser = NoiserMode::with_asrn({.num_bins = 10, .calibration_steps = 500});
  c.num_episodes = 100;  // shorter than calibration
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK_NOTHROW(validate(tiny_config()));
}

TEST_CASE("calibration-only runs produce a valid table") {
  ExperimentConfig c = tiny_config();
  c.num_episodes = 10000;
  c.noiser = NoiserMode::with_asrn({.num_bins = 10, .calibration_steps = 1000});
  const NoiseTable table = calibrate_noise_table(c);
  CHECK(table.num_bins() >= 1);
  CHECK(table.num_bins() <= 10);
  CHECK(table.s_max > 0.0);
  for (std::size_t b = 0; b < table.num_bins(); ++b) {
    const double lhs = table.bin_std[b] * table.bin_std[b] +
                       table.bin_noise[b] * table.bin_noise[b];
    CHECK(lhs == doctest::Approx(table.s_max * table.s_max).epsilon(1e-9));
  }

  ExperimentConfig not_asrn = tiny_config();
  CHECK_THROWS_AS(calibrate_noise_table(not_asrn), ConfigError);
}

TEST_CASE("default sweep grid spans the documented ranges") {
  const SweepSpec spec = default_sweep_spec();
  REQUIRE(spec.sigma_left_values.size() == 21);
  REQUIRE(spec.sigma_right_values.size() == 20);
  CHECK(spec.sigma_left_values.front() == 0.0);
  CHECK(spec.sigma_left_values.back() == 5.0);
  CHECK(spec.sigma_right_values.front() == 0.5);
  CHECK(spec.sigma_right_values.back() == 10.0);
}
