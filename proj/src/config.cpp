#include "spabm/config.hpp"

#include "spabm/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace spabm {

namespace {

std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_items(std::string_view value) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    out.push_back(trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(what + ": not a number: '" + std::string(s) + "'");
  return v;
}

long long to_integer(std::string_view s, const std::string& what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(what + ": not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::uint64_t fnv1a(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::set<std::string>& allowed,
                                     const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    for (char c : key)
      if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) throw ConfigError(where + ": invalid key '" + key + "'");
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (!cfg.values_.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return cfg;
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
  return it->second;
}

double KeyValueConfig::number(const std::string& key) const { return to_double(trim(raw(key)), source_ + ": " + key); }

long long KeyValueConfig::integer(const std::string& key) const {
  return to_integer(trim(raw(key)), source_ + ": " + key);
}

bool KeyValueConfig::boolean(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(source_ + ": " + key + ": not a boolean: '" + v + "'");
}

std::vector<double> KeyValueConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (auto item : split_items(raw(key))) out.push_back(to_double(item, source_ + ": " + key));
  return out;
}

std::vector<long long> KeyValueConfig::integers(const std::string& key) const {
  std::vector<long long> out;
  for (auto item : split_items(raw(key))) out.push_back(to_integer(item, source_ + ": " + key));
  return out;
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::vector<int> parse_int_range(std::string_view text) {
  std::vector<int> out;
  for (auto item : split_items(text)) {
    if (item.empty()) throw ConfigError("empty item in range '" + std::string(text) + "'");
    const std::size_t dash = item.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(static_cast<int>(to_integer(item, "range")));
      continue;
    }
    const long long lo = to_integer(trim(item.substr(0, dash)), "range");
    const long long hi = to_integer(trim(item.substr(dash + 1)), "range");
    if (hi < lo) throw ConfigError("descending range '" + std::string(item) + "'");
    for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace spabm
