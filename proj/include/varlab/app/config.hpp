#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace varlab::app {

// Flat "key = value" configuration. Keys outside the documented set are
// rejected at parse time; values are parsed lazily by the typed getters.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::optional<std::uint64_t> get_seed() const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  // Input file named by key; relative paths are taken from the directory of
  // the loaded config file (the working directory for parsed text).
  std::filesystem::path get_path(const std::string& key) const;
  // Semicolon-separated vectors of comma-separated numbers.
  std::vector<std::vector<double>> get_vectors(const std::string& key) const;

  // FNV-1a 64 over the sorted "key=value" lines, as 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;  // not part of the hash
};

const std::set<std::string>& known_keys();

double parse_number(const std::string& text, const std::string& what);

}  // namespace varlab::app
