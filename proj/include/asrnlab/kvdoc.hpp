#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace asrnlab {

/// Flat "key = value" text document: one pair per line, '#' comments,
/// insertion-ordered, later assignments overwrite earlier ones. Doubles
/// are written in shortest round-trip form so serialize/parse cycles are
/// bit-exact. Used for config files, noise-table dumps and run summaries.
class KvDoc {
 public:
  KvDoc() = default;

  /// Throws ConfigError on malformed lines.
  static KvDoc parse(std::string_view text);

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;

  /// Typed getters throw ConfigError when the value does not parse.
  std::optional<double> get_double(std::string_view key) const;
  std::optional<std::int64_t> get_int(std::string_view key) const;
  std::optional<std::uint64_t> get_uint(std::string_view key) const;
  /// Space-separated list of doubles.
  std::optional<std::vector<double>> get_doubles(std::string_view key) const;

  void set(std::string_view key, std::string_view value);
  void set_double(std::string_view key, double value);
  void set_int(std::string_view key, std::int64_t value);
  void set_uint(std::string_view key, std::uint64_t value);
  void set_doubles(std::string_view key, const std::vector<double>& values);

  std::string serialize() const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Strict full-string parse. Throws ConfigError on failure.
double parse_double(std::string_view text);

/// Writes content to path atomically (temp file + rename), so a crash
/// never leaves a truncated file. Throws std::runtime_error on I/O errors.
void write_file_atomic(const std::string& path, std::string_view content);

/// Reads a whole file. Throws std::runtime_error if unreadable.
std::string read_file(const std::string& path);

}  // namespace asrnlab
