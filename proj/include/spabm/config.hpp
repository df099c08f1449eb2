#pragma once

// Key-value configuration files.
//
// Grammar, one entry per line:
//   line    := blank | comment | entry
//   comment := '#' anything
//   entry   := key '=' value [comment]
//   key     := [a-z0-9_]+
//   value   := item (',' item)*
// Whitespace around keys, values and items is ignored. A key may appear only
// once. Keys not in the caller's allowed set are rejected.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace spabm {

// 64-bit FNV-1a, rendered as 16 hex digits.
std::uint64_t fnv1a(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t x);

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text, const std::set<std::string>& allowed,
                              const std::string& source = "<config>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::string& raw(const std::string& key) const;

  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<long long> integers(const std::string& key) const;

  // Sorted "key=value" lines; the basis of the config hash.
  std::string canonical() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string source_ = "<config>";
};

// Integer range list: "2-6" or "2,3,5" or a mix such as "2-4,7".
std::vector<int> parse_int_range(std::string_view text);

}  // namespace spabm
