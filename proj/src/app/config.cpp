#include "varlab/app/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "varlab/errors.hpp"

namespace varlab::app {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      // experiment selection and oracle
      "experiment", "oracle", "dim", "grid_m", "nonlinearity_csv", "seed",
      // lambda and perturbation
      "lambda", "lambdas", "lambda_unit", "y0", "y0_scale",
      // convex set for the ascent
      "convex_set", "convex_center", "convex_radius", "convex_point", "convex_basis", "convex_normals",
      "convex_offsets",
      // solver tolerances
      "residual_tol", "cluster_dist_tol", "cluster_energy_rel", "max_iterations", "hess_tol", "barrier_margin_rel",
      "path_nodes", "path_step", "newton_max_dim", "n_starts", "grad_tol", "max_ascent_steps",
      // growth constants
      "beta_directions", "beta_scan_points", "alpha_r0", "alpha_levels", "alpha_directions", "alpha_override",
      // decomposable
      "catalog_f", "cells", "weights", "bound", "candidates", "descent_steps", "strict_margin", "minimax_cells",
      "minimax_bound", "minimax_grid",
      // minimax
      "instances", "random_instances",
      // outputs
      "trace_path", "csv_path"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace

double parse_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end || std::isnan(value)) {
    fail(ErrorCode::parse, what + ": '" + text + "' is not a number");
  }
  return value;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) fail(ErrorCode::parse, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (c.has(key)) fail(ErrorCode::parse, where + ": duplicate key '" + key + "'");
    try {
      c.set(key, value);
    } catch (const Error& e) {
      fail(ErrorCode::parse, where + ": " + e.what());
    }
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::parse, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Config c = parse(buffer.str(), path.string());
  c.base_dir_ = path.parent_path();
  return c;
}

std::filesystem::path Config::get_path(const std::string& key) const {
  const std::filesystem::path p = get_string(key, "");
  if (p.empty() || p.is_absolute()) return p;
  return base_dir_ / p;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) fail(ErrorCode::parse, "unknown config key '" + key + "'");
  if (value.empty()) fail(ErrorCode::parse, "empty value for '" + key + "'");
  values_[key] = value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number(it->second, key);
}

std::optional<double> Config::get_optional_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return parse_number(it->second, key);
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t value = 0;
  const std::string& t = it->second;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorCode::parse, key + ": '" + t + "' is not a non-negative integer");
  }
  return value;
}

std::optional<std::uint64_t> Config::get_seed() const {
  const auto it = values_.find("seed");
  if (it == values_.end()) return std::nullopt;
  std::uint64_t value = 0;
  const std::string& t = it->second;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) fail(ErrorCode::parse, "seed: '" + t + "' is not a 64-bit integer");
  return value;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const std::string& item : split(it->second, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_number(item, key));
  }
  return out;
}

std::vector<std::vector<double>> Config::get_vectors(const std::string& key) const {
  std::vector<std::vector<double>> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  for (const std::string& vec : split(it->second, ';')) {
    if (vec.empty()) continue;
    std::vector<double> v;
    for (const std::string& item : split(vec, ',')) v.push_back(parse_number(item, key));
    out.push_back(std::move(v));
  }
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : values_) feed(k + "=" + v + "\n");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace varlab::app
