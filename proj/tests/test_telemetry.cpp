#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "asrnlab/errors.hpp"
#include "asrnlab/random.hpp"
#include "asrnlab/telemetry.hpp"

using namespace asrnlab;

namespace {

StepRecord make_record(long episode, int agent, int action, double upsilon,
                       double q_left, double q_right) {
  StepRecord r;
  r.episode = episode;
  r.agent_id = agent;
  r.action = action;
  r.upsilon = upsilon;
  r.q_values = {q_left, q_right};
  return r;
}

}  // namespace

TEST_CASE("smoothing is a trailing moving average") {
  SUBCASE("constants are invariant") {
    const std::vector<double> c(20, 3.25);
    for (std::size_t k : {1u, 2u, 7u, 50u}) {
      CHECK(smooth(c, k) == c);
    }
  }
  SUBCASE("kernel length one is the identity") {
    const std::vector<double> s{1.0, -2.0, 0.5};
    CHECK(smooth(s, 1) == s);
  }
  SUBCASE("hand-checked alternating series") {
    const std::vector<double> out = smooth({0.0, 1.0, 0.0, 1.0}, 2);
    REQUIRE(out.size() == 4);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.5);
    CHECK(out[2] == 0.5);
    CHECK(out[3] == 0.5);
  }
  SUBCASE("zero kernel is rejected") {
    CHECK_THROWS_AS(smooth({1.0}, 0), ConfigError);
  }
  SUBCASE("output is length-preserving and bounded by the input") {
    RandomStream rng(55);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> series(1 + rng.next_below(200));
      for (double& v : series) v = rng.next_normal(0.0, 5.0);
      const auto out = smooth(series, 1 + rng.next_below(60));
      REQUIRE(out.size() == series.size());
      const double lo = *std::min_element(series.begin(), series.end());
      const double hi = *std::max_element(series.begin(), series.end());
      for (double v : out) {
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
      }
    }
  }
  SUBCASE("interior points are shift-equivariant") {
    const std::vector<double> series{1.0, 4.0, 2.0, 8.0, 5.0, 7.0, 3.0};
    std::vector<double> shifted(series.begin() + 1, series.end());
    const auto a = smooth(series, 3);
    const auto b = smooth(shifted, 3);
    // once the window is full, smoothing commutes with shifting
    for (std::size_t t = 3; t < shifted.size(); ++t) {
      CHECK(b[t] == doctest::Approx(a[t + 1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("success fraction counts greedy right-arm agents") {
  RunLog log;
  log.agents.resize(3);
  log.agents[0] = {make_record(0, 0, 1, 0.1, 0.0, 20.0)};   // right
  log.agents[1] = {make_record(0, 1, 0, 0.1, 5.0, 1.0)};    // left
  log.agents[2] = {make_record(0, 2, 1, 0.1, 2.0, 2.0)};    // tie -> 0.5
  CHECK(success_fraction(log, 0) == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("all right") {
    log.agents[1] = {make_record(0, 1, 1, 0.1, 0.0, 1.0)};
    log.agents[2] = {make_record(0, 2, 1, 0.1, -1.0, 0.0)};
    CHECK(success_fraction(log, 0) == 1.0);
  }
  SUBCASE("empty logs and missing episodes raise") {
    CHECK_THROWS_AS(success_fraction(RunLog{}, 0), RangeError);
    CHECK_THROWS_AS(success_fraction(log, 5), RangeError);
  }
  SUBCASE("counting oracle on a synthetic population") {
    RunLog big;
    big.agents.resize(100);
    for (int a = 0; a < 100; ++a) {
      const bool right = a < 60;
      big.agents[a] = {make_record(0, a, 0, 0.0, right ? 0.0 : 2.0,
                                   right ? 1.0 : 0.0)};
    }
    CHECK(success_fraction(big, 0) == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("complementary counting: right + left + ties == 1") {
    RandomStream rng(66);
    RunLog pop;
    pop.agents.resize(50);
    int rights = 0, lefts = 0, ties = 0;
    for (int a = 0; a < 50; ++a) {
      const double ql = rng.next_below(3);
      const double qr = rng.next_below(3);
      pop.agents[a] = {make_record(0, a, 0, 0.0, ql, qr)};
      if (qr > ql) ++rights;
      else if (ql > qr) ++lefts;
      else ++ties;
    }
    const double frac = success_fraction(pop, 0);
    CHECK(frac == doctest::Approx((rights + 0.5 * ties) / 50.0).epsilon(1e-12));
    CHECK(rights + lefts + ties == 50);
  }
}

TEST_CASE("grouped upsilon means split by the pulled arm") {
  RunLog log;
  log.agents.resize(2);
  log.agents[0] = {make_record(0, 0, 1, 0.2, 0.0, 1.0)};
  log.agents[1] = {make_record(0, 1, 0, 0.4, 0.0, 1.0)};
  const GroupedUpsilon g = grouped_mean_upsilon(log, 0);
  CHECK(g.mean_right == 0.2);
  CHECK(g.mean_left == 0.4);

  SUBCASE("an unpulled side is absent, never zero") {
    log.agents[1] = {make_record(0, 1, 1, 0.4, 0.0, 1.0)};
    const GroupedUpsilon all_right = grouped_mean_upsilon(log, 0);
    CHECK(all_right.mean_right == doctest::Approx(0.3).epsilon(1e-12));
    CHECK_FALSE(all_right.mean_left.has_value());
  }
}

TEST_CASE("trap events fire on greedy preference flips") {
  SUBCASE("monotone success never traps") {
    std::vector<StepRecord> log;
    for (long t = 0; t < 100; ++t) {
      log.push_back(make_record(t, 0, 1, 0.1, 0.0, 10.0));
    }
    CHECK(detect_trap_events(log).empty());
  }
  SUBCASE("synthetic flip at 40 and back at 320") {
    std::vector<StepRecord> log;
    for (long t = 0; t < 400; ++t) {
      const bool trapped = t >= 40 && t < 320;
      log.push_back(make_record(t, 0, trapped ? 0 : 1, 0.1,
                                trapped ? 1.0 : 0.0, 0.5));
    }
    const auto events = detect_trap_events(log);
    REQUIRE(events.size() == 2);
    CHECK(events[0].episode == 40);
    CHECK(events[0].kind == TrapEventKind::enter);
    CHECK(events[1].episode == 320);
    CHECK(events[1].kind == TrapEventKind::exit);
  }
  SUBCASE("a log that ends trapped leaves the last enter open") {
    std::vector<StepRecord> log;
    for (long t = 0; t < 100; ++t) {
      log.push_back(make_record(t, 0, 0, 0.1, t >= 70 ? 5.0 : 0.0, 1.0));
    }
    const auto events = detect_trap_events(log);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == TrapEventKind::enter);
    CHECK(events[0].episode == 70);
  }
  SUBCASE("alternation holds on random walks") {
    RandomStream rng(77);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<StepRecord> log;
      double ql = 0.0, qr = 1.0;
      for (long t = 0; t < 500; ++t) {
        ql += rng.next_normal(0.0, 0.3);
        qr += rng.next_normal(0.0, 0.3);
        log.push_back(make_record(t, 0, 0, 0.0, ql, qr));
      }
      const auto events = detect_trap_events(log);
      for (std::size_t i = 0; i < events.size(); ++i) {
        const auto expected =
            i % 2 == 0 ? TrapEventKind::enter : TrapEventKind::exit;
        CHECK(events[i].kind == expected);
        if (i > 0) CHECK(events[i].episode > events[i - 1].episode);
      }
    }
  }
}

TEST_CASE("csv exports use the fixed schemas") {
  RunLog log;
  log.agents.resize(2);
  StepRecord a = make_record(0, 0, 1, 0.25, 0.0, 20.0);
  a.raw_reward = 1.5;
  a.noised_reward = 1.25;
  a.epsilon = 0.5;
  StepRecord b = make_record(0, 1, 0, 0.5, 3.0, 2.0);
  log.agents[0] = {a};
  log.agents[1] = {b};

  std::ostringstream steps;
  write_steps_csv(steps, log);
  CHECK(steps.str() ==
        "agent_id,episode,action,raw_reward,noised_reward,upsilon,epsilon,"
        "q_left,q_right\n"
        "0,0,1,1.5,1.25,0.25,0.5,0,20\n"
        "1,0,0,0,0,0.5,0,3,2\n");

  std::ostringstream success;
  write_success_csv(success, log);
  CHECK(success.str() == "episode,success_fraction\n0,0.5\n");

  std::ostringstream ups;
  write_upsilon_csv(ups, log);
  CHECK(ups.str() ==
        "episode,mean_upsilon_right,mean_upsilon_left\n0,0.25,0.5\n");

  SUBCASE("absent group leaves an empty cell") {
    log.agents[1][0].action = 1;
    std::ostringstream again;
    write_upsilon_csv(again, log);
    CHECK(again.str() ==
          "episode,mean_upsilon_right,mean_upsilon_left\n0,0.375,\n");
  }

  SUBCASE("trap events csv") {
    std::ostringstream events;
    write_trap_events_csv(
        events, {{40, TrapEventKind::enter}, {320, TrapEventKind::exit}});
    CHECK(events.str() == "episode,kind\n40,enter\n320,exit\n");
  }
}
