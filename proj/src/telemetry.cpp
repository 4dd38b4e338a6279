#include "asrnlab/telemetry.hpp"

#include <algorithm>
#include <string>

#include "asrnlab/errors.hpp"
#include "asrnlab/kvdoc.hpp"

namespace asrnlab {

std::vector<double> smooth(const std::vector<double>& series,
                           std::size_t kernel_len) {
  if (kernel_len == 0) {
    throw ConfigError("smoothing kernel length must be >= 1");
  }
  std::vector<double> out(series.size());
  double window_sum = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    window_sum += series[t];
    if (t >= kernel_len) window_sum -= series[t - kernel_len];
    const std::size_t window = std::min(t + 1, kernel_len);
    out[t] = window_sum / static_cast<double>(window);
  }
  return out;
}

namespace {

const StepRecord& record_at(const RunLog& log, std::size_t agent,
                            long episode) {
  const auto& records = log.agents[agent];
  if (episode < 0 || static_cast<std::size_t>(episode) >= records.size()) {
    throw RangeError("episode " + std::to_string(episode) +
                     " missing from agent " + std::to_string(agent) +
                     "'s log");
  }
  return records[static_cast<std::size_t>(episode)];
}

}  // namespace

double success_fraction(const RunLog& log, long episode) {
  if (log.agents.empty()) {
    throw RangeError("success_fraction on an empty log");
  }
  double score = 0.0;
  for (std::size_t a = 0; a < log.agents.size(); ++a) {
    const auto& q = record_at(log, a, episode).q_values;
    const double best = *std::max_element(q.begin(), q.end());
    if (q.size() > 1 && q[1] == best) {
      const bool tied =
          std::count(q.begin(), q.end(), best) > 1;
      score += tied ? 0.5 : 1.0;
    }
  }
  return score / static_cast<double>(log.agents.size());
}

GroupedUpsilon grouped_mean_upsilon(const RunLog& log, long episode) {
  double sum_right = 0.0, sum_left = 0.0;
  long n_right = 0, n_left = 0;
  for (std::size_t a = 0; a < log.agents.size(); ++a) {
    const StepRecord& rec = record_at(log, a, episode);
    if (rec.action == 1) {
      sum_right += rec.upsilon;
      ++n_right;
    } else {
      sum_left += rec.upsilon;
      ++n_left;
    }
  }
  GroupedUpsilon result;
  if (n_right > 0) result.mean_right = sum_right / static_cast<double>(n_right);
  if (n_left > 0) result.mean_left = sum_left / static_cast<double>(n_left);
  return result;
}

std::vector<TrapEvent> detect_trap_events(std::span<const StepRecord> log) {
  std::vector<TrapEvent> events;
  bool trapped = false;  // optimal init with mu_r > mu_l starts untrapped
  for (const StepRecord& rec : log) {
    const auto& q = rec.q_values;
    const bool now = q.size() > 1 && q[0] > q[1];
    if (now != trapped) {
      events.push_back(
          {rec.episode, now ? TrapEventKind::enter : TrapEventKind::exit});
      trapped = now;
    }
  }
  return events;
}

void write_steps_csv(std::ostream& out, const RunLog& log) {
  out << "agent_id,episode,action,raw_reward,noised_reward,upsilon,epsilon,"
         "q_left,q_right\n";
  for (const auto& records : log.agents) {
    for (const StepRecord& r : records) {
      out << r.agent_id << ',' << r.episode << ',' << r.action << ','
          << format_double(r.raw_reward) << ','
          << format_double(r.noised_reward) << ','
          << format_double(r.upsilon) << ',' << format_double(r.epsilon)
          << ',' << format_double(r.q_values.size() > 0 ? r.q_values[0] : 0.0)
          << ',' << format_double(r.q_values.size() > 1 ? r.q_values[1] : 0.0)
          << '\n';
    }
  }
}

void write_success_csv(std::ostream& out, const RunLog& log) {
  out << "episode,success_fraction\n";
  const long episodes = log.num_episodes();
  for (long t = 0; t < episodes; ++t) {
    out << t << ',' << format_double(success_fraction(log, t)) << '\n';
  }
}

void write_upsilon_csv(std::ostream& out, const RunLog& log) {
  out << "episode,mean_upsilon_right,mean_upsilon_left\n";
  const long episodes = log.num_episodes();
  for (long t = 0; t < episodes; ++t) {
    const GroupedUpsilon g = grouped_mean_upsilon(log, t);
    out << t << ',';
    if (g.mean_right) out << format_double(*g.mean_right);
    out << ',';
    if (g.mean_left) out << format_double(*g.mean_left);
    out << '\n';
  }
}

void write_trap_events_csv(std::ostream& out,
                           const std::vector<TrapEvent>& events) {
  out << "episode,kind\n";
  for (const TrapEvent& e : events) {
    out << e.episode << ','
        << (e.kind == TrapEventKind::enter ? "enter" : "exit") << '\n';
  }
}

}  // namespace asrnlab
