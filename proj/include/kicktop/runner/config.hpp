#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../errors.hpp"

namespace kicktop {

// Flat key-value configuration with one [section] naming the experiment
// kind. '#' starts a comment; values may be lists ("0.01, 0.1") and angles
// may use pi ("pi/2", "4pi/11"). Unknown keys are errors, checked against
// the schema of the experiment being run.
struct RawConfig {
  std::string kind;
  std::map<std::string, std::string> values;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

} // namespace detail

inline RawConfig parse_config_text(std::istream& in, const std::string& origin) {
  RawConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      if (!cfg.kind.empty())
        throw ConfigError(origin + ": multiple sections; one experiment per file");
      cfg.kind = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    if (cfg.kind.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key before any [section]");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.values.contains(key))
      throw ConfigError(origin + ": duplicate key '" + key + "'");
    cfg.values[key] = value;
  }
  if (cfg.kind.empty()) throw ConfigError(origin + ": missing [section] header");
  return cfg;
}

inline RawConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config_text(in, path);
}

// Parses "2.25", "pi", "pi/2", "4pi/11", "-pi/3", "0.5pi".
inline double parse_angle(const std::string& raw) {
  const std::string s = detail::trim(raw);
  const auto pos = s.find("pi");
  if (pos == std::string::npos) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + raw + "'");
    }
    if (detail::trim(s.substr(used)).size())
      throw ConfigError("trailing characters in number '" + raw + "'");
    return v;
  }
  std::string head = detail::trim(s.substr(0, pos));
  double coeff = 1.0;
  if (head == "-")
    coeff = -1.0;
  else if (!head.empty())
    coeff = parse_angle(head);
  double denom = 1.0;
  std::string tail = detail::trim(s.substr(pos + 2));
  if (!tail.empty()) {
    if (tail.front() != '/')
      throw ConfigError("cannot parse angle '" + raw + "'");
    denom = parse_angle(tail.substr(1));
  }
  return coeff * std::numbers::pi / denom;
}

// Typed access to a RawConfig with schema checking.
class ConfigView {
public:
  ConfigView(RawConfig cfg, std::set<std::string> allowed) : cfg_(std::move(cfg)) {
    for (const auto& [key, value] : cfg_.values)
      if (!allowed.contains(key))
        throw ConfigError("unknown key '" + key + "' for experiment [" + cfg_.kind + "]");
  }

  const std::string& kind() const { return cfg_.kind; }
  bool has(const std::string& key) const { return cfg_.values.contains(key); }

  std::string str(const std::string& key, const std::string& fallback = {}) const {
    const auto it = cfg_.values.find(key);
    return it == cfg_.values.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    const auto it = cfg_.values.find(key);
    if (it == cfg_.values.end())
      throw ConfigError("missing required key '" + key + "' in [" + cfg_.kind + "]");
    return it->second;
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? parse_angle(require(key)) : fallback;
  }

  double number(const std::string& key) const { return parse_angle(require(key)); }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = parse_angle(require(key));
    const long r = static_cast<long>(v);
    if (double(r) != v) throw ConfigError("key '" + key + "' must be an integer");
    return r;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    try {
      return std::stoull(require(key));
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' must be a nonnegative integer seed");
    }
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(require(key));
    while (std::getline(ss, item, ',')) out.push_back(parse_angle(item));
    if (out.empty()) throw ConfigError("key '" + key + "' must hold at least one value");
    return out;
  }

  // "theta phi" pairs separated by ';'
  std::vector<std::pair<double, double>> state_list(const std::string& key) const {
    std::vector<std::pair<double, double>> out;
    std::string item;
    std::istringstream ss(require(key));
    while (std::getline(ss, item, ';')) {
      std::istringstream pair(item);
      std::string a, b, extra;
      if (!(pair >> a >> b) || (pair >> extra))
        throw ConfigError("state entries must be 'theta phi' pairs: '" + item + "'");
      out.emplace_back(parse_angle(a), parse_angle(b));
    }
    if (out.empty()) throw ConfigError("key '" + key + "' must hold at least one state");
    return out;
  }

  const std::map<std::string, std::string>& raw() const { return cfg_.values; }

private:
  RawConfig cfg_;
};

// The four canonical initial states.
inline std::pair<double, double> state_preset(const std::string& name) {
  if (name == "k1-regular") return {2.25, 1.1};
  if (name == "k3-regular") return {2.25, 2.5};
  if (name == "k3-chaotic") return {2.25, 1.1};
  if (name == "k6-chaotic") return {2.25, 1.1};
  throw ConfigError("unknown state preset '" + name +
                    "' (known: k1-regular, k3-regular, k3-chaotic, k6-chaotic)");
}

} // namespace kicktop
