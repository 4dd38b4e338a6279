#include "asrnlab/kvdoc.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "asrnlab/errors.hpp"

namespace asrnlab {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

KvDoc KvDoc::parse(std::string_view text) {
  KvDoc doc;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + std::string(line) +
                        "'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    doc.set(key, value);
  }
  return doc;
}

bool KvDoc::has(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return true;
  }
  return false;
}

std::optional<std::string> KvDoc::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::optional<double> KvDoc::get_double(std::string_view key) const {
  const auto raw = get(key);
  if (!raw) return std::nullopt;
  return parse_double(*raw);
}

std::optional<std::int64_t> KvDoc::get_int(std::string_view key) const {
  const auto raw = get(key);
  if (!raw) return std::nullopt;
  std::int64_t value = 0;
  const std::string_view s = *raw;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("key '" + std::string(key) + "': not an integer: '" +
                      *raw + "'");
  }
  return value;
}

std::optional<std::uint64_t> KvDoc::get_uint(std::string_view key) const {
  const auto raw = get(key);
  if (!raw) return std::nullopt;
  std::uint64_t value = 0;
  const std::string_view s = *raw;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("key '" + std::string(key) +
                      "': not an unsigned integer: '" + *raw + "'");
  }
  return value;
}

std::optional<std::vector<double>> KvDoc::get_doubles(
    std::string_view key) const {
  const auto raw = get(key);
  if (!raw) return std::nullopt;
  std::vector<double> values;
  std::istringstream in(*raw);
  std::string token;
  while (in >> token) values.push_back(parse_double(token));
  return values;
}

void KvDoc::set(std::string_view key, std::string_view value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::string(value);
      return;
    }
  }
  entries_.emplace_back(std::string(key), std::string(value));
}

void KvDoc::set_double(std::string_view key, double value) {
  set(key, format_double(value));
}

void KvDoc::set_int(std::string_view key, std::int64_t value) {
  set(key, std::to_string(value));
}

void KvDoc::set_uint(std::string_view key, std::uint64_t value) {
  set(key, std::to_string(value));
}

void KvDoc::set_doubles(std::string_view key,
                        const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) joined += ' ';
    joined += format_double(values[i]);
  }
  set(key, joined);
}

std::string KvDoc::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("rename failed: " + tmp + " -> " + path + ": " +
                             std::generic_category().message(errno));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace asrnlab
