#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asrnlab/random.hpp"

namespace asrnlab {

/// How calibration updates are partitioned into bins.
///   quantile:    equal-count bins over the sorted update magnitudes;
///                every bin is guaranteed at least one sample.
///   equal_width: evenly spaced edges over [min, max]; bins may end up
///                with fewer than 2 samples (their std is taken as 0).
enum class BinningMode { quantile, equal_width };

struct AsrnConfig {
  int num_bins = 10;             // requested bin count B
  long calibration_steps = 1000; // length of the un-noised observation phase
  BinningMode binning = BinningMode::quantile;
};

/// Throws ConfigError unless num_bins >= 1 and
/// calibration_steps >= 2 * num_bins.
void validate(const AsrnConfig& config);

/// Append-only store of (update magnitude, raw reward) pairs collected
/// during the calibration phase. Single-owner: one agent, one buffer.
class CalibrationBuffer {
 public:
  explicit CalibrationBuffer(long capacity);

  /// Throws PhaseError once the buffer holds capacity() samples.
  void observe(double upsilon, double reward);

  bool full() const noexcept {
    return static_cast<long>(samples_.size()) >= capacity_;
  }
  std::size_t size() const noexcept { return samples_.size(); }
  long capacity() const noexcept { return capacity_; }
  const std::vector<std::pair<double, double>>& samples() const noexcept {
    return samples_;
  }

 private:
  std::vector<std::pair<double, double>> samples_;  // (upsilon, reward)
  long capacity_;
};

/// Calibrated per-bin noise levels. Immutable after construction and safe
/// to share read-only across agents.
///
/// For every bin, bin_std[b]^2 + bin_noise[b]^2 == s_max^2: noising tops
/// each bin's observed reward spread up to the spread of the noisiest bin,
/// so post-noise reward variance no longer depends on the bin.
struct NoiseTable {
  std::vector<double> edges;      // ascending upsilon boundaries, bins-1 long
  std::vector<double> bin_std;    // S_b: population std of rewards per bin
  std::vector<double> bin_noise;  // N_b = sqrt(s_max^2 - S_b^2)
  double s_max = 0.0;             // max_b S_b
  AsrnConfig config;              // configuration the table was built with

  std::size_t num_bins() const noexcept { return bin_std.size(); }
};

/// Builds the noise table from a finished calibration buffer. Bins are
/// equal-count partitions of the sorted upsilon values (or equal-width
/// intervals, per config); per bin the reward population-std S_b is
/// measured and the noise level N_b = sqrt(s_max^2 - S_b^2) derived.
/// All upsilon values identical degenerates to a single bin with N = [0].
/// Throws CalibrationError when the buffer holds fewer than
/// 2 * num_bins samples.
NoiseTable finalize_calibration(const CalibrationBuffer& buffer,
                                const AsrnConfig& config);

/// Bin whose upsilon interval contains the given update magnitude.
/// Out-of-range values clamp to the extreme bins, so lookup is total.
std::size_t lookup_bin(const NoiseTable& table, double upsilon);

/// Noised reward r' ~ Normal(reward, N_b^2) with b chosen by upsilon.
/// A zero-noise bin passes the reward through bit-identically and
/// consumes no draws.
double noise_reward(const NoiseTable& table, double reward, double upsilon,
                    RandomStream& rng);

/// Baseline mode: identical Normal(reward, sigma^2) noise for every
/// reward, no binning or calibration.
double uniform_noise(double reward, double sigma, RandomStream& rng);

/// Serializes a table to the flat key=value text form. Values use
/// shortest round-trip formatting, so read_noise_table(write_noise_table(t))
/// reproduces t bit-exactly.
std::string write_noise_table(const NoiseTable& table);
NoiseTable read_noise_table(const std::string& text);

/// Runtime noising modes.
struct NoiserMode {
  enum class Kind { off, asrn, uniform };
  Kind kind = Kind::off;
  AsrnConfig asrn;             // used when kind == asrn
  double uniform_sigma = 0.1;  // used when kind == uniform

  static NoiserMode off() { return {}; }
  static NoiserMode with_asrn(AsrnConfig config) {
    NoiserMode m;
    m.kind = Kind::asrn;
    m.asrn = config;
    return m;
  }
  static NoiserMode with_uniform(double sigma) {
    NoiserMode m;
    m.kind = Kind::uniform;
    m.uniform_sigma = sigma;
    return m;
  }
};

/// Per-agent noising pipeline. In asrn mode it runs the calibration
/// phase (rewards pass through un-noised while (upsilon, reward) pairs are
/// collected), finalizes the table when the buffer fills, and noises every
/// later reward according to its bin.
class Noiser {
 public:
  explicit Noiser(const NoiserMode& mode);

  /// Starts past calibration with a ready-made table (pooled calibration:
  /// one agent's table shared by others, or a table loaded from disk).
  static Noiser with_table(NoiseTable table);

  /// upsilon is the update magnitude the raw reward would cause; it picks
  /// the bin. Returns the reward to feed the learner.
  double process(double reward, double upsilon, RandomStream& rng);

  bool calibrating() const noexcept;
  /// Finalized table, or nullptr while calibrating / in off and uniform
  /// modes.
  const NoiseTable* table() const noexcept;

 private:
  NoiserMode mode_;
  std::optional<CalibrationBuffer> buffer_;
  std::optional<NoiseTable> table_;
};

}  // namespace asrnlab
