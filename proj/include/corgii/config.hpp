#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace corgii {

/// Flat key=value settings. Blank lines and lines starting with '#' are
/// ignored. Every typed getter marks its key as used so callers can reject
/// misspelled keys with unused().
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  std::vector<std::string> unused() const;
  /// Canonical text: sorted "key=value" lines.
  std::string dump() const;

 private:
  const std::string* find(const std::string& key) const;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace corgii
