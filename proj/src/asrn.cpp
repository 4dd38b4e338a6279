#include "asrnlab/asrn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asrnlab/errors.hpp"
#include "asrnlab/kvdoc.hpp"

namespace asrnlab {

void validate(const AsrnConfig& config) {
  if (config.num_bins < 1) {
    throw ConfigError("num_bins must be >= 1, got " +
                      std::to_string(config.num_bins));
  }
  if (config.calibration_steps < 2L * config.num_bins) {
    throw ConfigError("calibration_steps must be >= 2 * num_bins (" +
                      std::to_string(2L * config.num_bins) + "), got " +
                      std::to_string(config.calibration_steps));
  }
}

CalibrationBuffer::CalibrationBuffer(long capacity) : capacity_(capacity) {
  if (capacity < 1) {
    throw ConfigError("calibration buffer capacity must be >= 1");
  }
  samples_.reserve(static_cast<std::size_t>(capacity));
}

void CalibrationBuffer::observe(double upsilon, double reward) {
  if (full()) {
    throw PhaseError("calibration is over (" + std::to_string(capacity_) +
                     " samples collected); observe() is no longer valid");
  }
  samples_.emplace_back(upsilon, reward);
}

namespace {

double population_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return std::sqrt(var);
}

std::vector<double> quantile_edges(std::vector<double> upsilons, int bins) {
  std::sort(upsilons.begin(), upsilons.end());
  const std::size_t n = upsilons.size();
  std::vector<double> edges;
  for (int k = 1; k < bins; ++k) {
    edges.push_back(upsilons[static_cast<std::size_t>(k) * n / bins]);
  }
  // Collapse duplicate cuts and cuts at the minimum (their lower bin
  // would be empty). Heavy upsilon ties shrink the effective bin count.
  std::vector<double> unique;
  for (double e : edges) {
    if (e > upsilons.front() && (unique.empty() || e > unique.back())) {
      unique.push_back(e);
    }
  }
  return unique;
}

std::vector<double> equal_width_edges(const std::vector<double>& upsilons,
                                      int bins) {
  const auto [lo_it, hi_it] =
      std::minmax_element(upsilons.begin(), upsilons.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> edges;
  if (hi <= lo) return edges;  // all identical: single bin
  for (int k = 1; k < bins; ++k) {
    edges.push_back(lo + (hi - lo) * k / bins);
  }
  return edges;
}

std::size_t bin_of(const std::vector<double>& edges, double upsilon) {
  return static_cast<std::size_t>(
      std::upper_bound(edges.begin(), edges.end(), upsilon) - edges.begin());
}

}  // namespace

NoiseTable finalize_calibration(const CalibrationBuffer& buffer,
                                const AsrnConfig& config) {
  validate(config);
  const auto& samples = buffer.samples();
  if (samples.size() < 2 * static_cast<std::size_t>(config.num_bins)) {
    throw CalibrationError(
        "need at least " + std::to_string(2 * config.num_bins) +
        " calibration samples for " + std::to_string(config.num_bins) +
        " bins, got " + std::to_string(samples.size()));
  }

  std::vector<double> upsilons;
  upsilons.reserve(samples.size());
  for (const auto& [u, r] : samples) upsilons.push_back(u);

  NoiseTable table;
  table.config = config;
  table.edges = config.binning == BinningMode::quantile
                    ? quantile_edges(upsilons, config.num_bins)
                    : equal_width_edges(upsilons, config.num_bins);

  const std::size_t bins = table.edges.size() + 1;
  std::vector<std::vector<double>> rewards(bins);
  for (const auto& [u, r] : samples) {
    rewards[bin_of(table.edges, u)].push_back(r);
  }

  table.bin_std.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    // Bins with < 2 rewards (possible with equal-width edges) show zero
    // observed spread and get the full noise level.
    table.bin_std[b] = population_std(rewards[b]);
  }
  table.s_max = *std::max_element(table.bin_std.begin(), table.bin_std.end());

  table.bin_noise.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double gap = table.s_max * table.s_max - table.bin_std[b] * table.bin_std[b];
    table.bin_noise[b] = gap > 0.0 ? std::sqrt(gap) : 0.0;
  }
  return table;
}

std::size_t lookup_bin(const NoiseTable& table, double upsilon) {
  return bin_of(table.edges, upsilon);
}

double noise_reward(const NoiseTable& table, double reward, double upsilon,
                    RandomStream& rng) {
  return rng.next_normal(reward, table.bin_noise[lookup_bin(table, upsilon)]);
}

double uniform_noise(double reward, double sigma, RandomStream& rng) {
  return rng.next_normal(reward, sigma);
}

std::string write_noise_table(const NoiseTable& table) {
  KvDoc doc;
  doc.set("format", "asrn-noise-table/1");
  doc.set_int("num_bins", table.config.num_bins);
  doc.set_int("calibration_steps", table.config.calibration_steps);
  doc.set("binning", table.config.binning == BinningMode::quantile
                         ? "quantile"
                         : "equal_width");
  doc.set_double("s_max", table.s_max);
  doc.set_doubles("edges", table.edges);
  doc.set_doubles("bin_std", table.bin_std);
  doc.set_doubles("bin_noise", table.bin_noise);
  return doc.serialize();
}

NoiseTable read_noise_table(const std::string& text) {
  const KvDoc doc = KvDoc::parse(text);
  if (doc.get("format").value_or("") != "asrn-noise-table/1") {
    throw ConfigError("not an asrn-noise-table/1 document");
  }
  NoiseTable table;
  table.config.num_bins = static_cast<int>(doc.get_int("num_bins").value_or(10));
  table.config.calibration_steps = doc.get_int("calibration_steps").value_or(1000);
  const auto binning = doc.get("binning").value_or("quantile");
  if (binning == "quantile") {
    table.config.binning = BinningMode::quantile;
  } else if (binning == "equal_width") {
    table.config.binning = BinningMode::equal_width;
  } else {
    throw ConfigError("unknown binning mode: " + binning);
  }
  const auto s_max = doc.get_double("s_max");
  const auto edges = doc.get_doubles("edges");
  const auto bin_std = doc.get_doubles("bin_std");
  const auto bin_noise = doc.get_doubles("bin_noise");
  if (!s_max || !edges || !bin_std || !bin_noise) {
    throw ConfigError("noise table document is missing fields");
  }
  table.s_max = *s_max;
  table.edges = *edges;
  table.bin_std = *bin_std;
  table.bin_noise = *bin_noise;
  if (table.bin_std.size() != table.bin_noise.size() ||
      table.bin_std.empty() ||
      table.edges.size() + 1 != table.bin_std.size()) {
    throw ConfigError("noise table document has inconsistent bin counts");
  }
  return table;
}

Noiser::Noiser(const NoiserMode& mode) : mode_(mode) {
  if (mode_.kind == NoiserMode::Kind::asrn) {
    validate(mode_.asrn);
    buffer_.emplace(mode_.asrn.calibration_steps);
  }
  if (mode_.kind == NoiserMode::Kind::uniform) {
    if (!(mode_.uniform_sigma >= 0.0) || !std::isfinite(mode_.uniform_sigma)) {
      throw ConfigError("uniform noise sigma must be finite and >= 0");
    }
  }
}

Noiser Noiser::with_table(NoiseTable table) {
  Noiser noiser(NoiserMode::with_asrn(table.config));
  noiser.buffer_.reset();
  noiser.table_ = std::move(table);
  return noiser;
}

double Noiser::process(double reward, double upsilon, RandomStream& rng) {
  switch (mode_.kind) {
    case NoiserMode::Kind::off:
      return reward;
    case NoiserMode::Kind::uniform:
      return uniform_noise(reward, mode_.uniform_sigma, rng);
    case NoiserMode::Kind::asrn:
      break;
  }
  if (table_) {
    return noise_reward(*table_, reward, upsilon, rng);
  }
  buffer_->observe(upsilon, reward);
  if (buffer_->full()) {
    table_ = finalize_calibration(*buffer_, mode_.asrn);
    buffer_.reset();
  }
  return reward;  // calibration phase passes rewards through un-noised
}

bool Noiser::calibrating() const noexcept {
  return mode_.kind == NoiserMode::Kind::asrn && !table_;
}

const NoiseTable* Noiser::table() const noexcept {
  return table_ ? &*table_ : nullptr;
}

}  // namespace asrnlab
