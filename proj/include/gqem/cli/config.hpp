#pragma once

// Flat key = value run configuration. One key per line, '#' starts a comment.
//
//   family = sphere          euclidean | sphere | hyperbolic
//   n = 3                    dimension; comma list allowed for scan
//   r = 1                    sphere radius
//   chart = polar            cartesian | stereographic | polar | poincare_ball
//   tau = 1                  comma list allowed for scan
//   m = 2                    positive real or inf; comma list allowed for scan
//   v_axis = 0
//   suite = all              all | pointwise | sample | integrals | comma list of check ids
//   points = 100
//   seed = 1
//   grid = 64x128
//   tol.order2 = 1e-8  tol.order3 = 1e-7  tol.order4 = 1e-6  tol.integral = 1e-6

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "../identities.hpp"
#include "../models.hpp"
#include "../quadrature.hpp"

namespace gqem::cli {

/// Invalid configuration or usage; maps to exit code 2.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"family", "n",      "r",    "chart", "tau",        "m",
                                             "v_axis", "suite",  "points", "seed", "grid",       "tol.order2",
                                             "tol.order3", "tol.order4", "tol.integral"};
  return keys;
}

struct RunConfig {
  Family family = Family::sphere;
  std::vector<int> dims;
  double radius = 1.0;
  std::optional<ChartKind> chart;
  std::vector<double> taus;
  std::vector<SyntheticDimension> ms;
  int v_axis = 0;
  std::vector<std::string> suite{"all"};
  std::size_t points = 100;
  std::uint64_t seed = 1;
  std::optional<std::vector<int>> grid;
  Tolerances tol;

  /// The model for one (n, tau, m) combination.
  ModelSpec spec(int n, double tau, SyntheticDimension m) const {
    ModelSpec s;
    s.family = family;
    s.dim = n;
    s.radius = radius;
    s.chart = chart.value_or(default_chart(family));
    s.tau = tau;
    s.m = m;
    s.v_axis = v_axis;
    return s;
  }

  /// The single model of verify/integrate runs.
  ModelSpec single_spec() const {
    if (dims.size() != 1 || taus.size() != 1 || ms.size() != 1)
      throw ConfigError("keys n, tau and m take a single value here; comma lists are for scan");
    return spec(dims[0], taus[0], ms[0]);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& key, const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!v.empty() && v.back() == ',') out.emplace_back();
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  for (const auto& x : out)
    if (x.empty()) throw ConfigError("key '" + key + "': empty list entry in '" + v + "'");
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(x))
    throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
  return x;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int x = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  return x;
}

inline SyntheticDimension parse_m(const std::string& v) {
  if (v == "inf" || v == "infinity") return SyntheticDimension::infinite();
  const double m = parse_double("m", v);
  if (!(m > 0.0)) throw ConfigError("key 'm': must be a positive real or inf, got '" + v + "'");
  return SyntheticDimension::finite(m);
}

inline double parse_tolerance(const std::string& key, const std::string& v) {
  const double t = parse_double(key, v);
  if (!(t > 0.0)) throw ConfigError("key '" + key + "': tolerance must be positive");
  return t;
}

}  // namespace detail

/// Raw key/value pairs in file order; rejects unknown and repeated keys.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(lineno) + ")");
    for (const auto& [k, _] : kv)
      if (k == key) throw ConfigError("config key '" + key + "' given twice");
    if (value.empty()) throw ConfigError("config key '" + key + "' has no value");
    kv.emplace_back(key, value);
  }
  return kv;
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  bool have_family = false;
  for (const auto& [key, v] : parse_key_values(text)) {
    try {
      if (key == "family") {
        c.family = parse_family(v);
        have_family = true;
      } else if (key == "n") {
        for (const auto& x : detail::split_list(key, v)) c.dims.push_back(detail::parse_int<int>(key, x));
      } else if (key == "r") {
        c.radius = detail::parse_double(key, v);
      } else if (key == "chart") {
        c.chart = parse_chart_kind(v);
      } else if (key == "tau") {
        for (const auto& x : detail::split_list(key, v)) c.taus.push_back(detail::parse_double(key, x));
      } else if (key == "m") {
        for (const auto& x : detail::split_list(key, v)) c.ms.push_back(detail::parse_m(x));
      } else if (key == "v_axis") {
        c.v_axis = detail::parse_int<int>(key, v);
      } else if (key == "suite") {
        c.suite = detail::split_list(key, v);
      } else if (key == "points") {
        c.points = detail::parse_int<std::size_t>(key, v);
        if (c.points == 0) throw ConfigError("key 'points': must be at least 1");
      } else if (key == "seed") {
        c.seed = detail::parse_int<std::uint64_t>(key, v);
      } else if (key == "grid") {
        c.grid = parse_resolution(v);
      } else if (key == "tol.order2") {
        c.tol.order2 = detail::parse_tolerance(key, v);
      } else if (key == "tol.order3") {
        c.tol.order3 = detail::parse_tolerance(key, v);
      } else if (key == "tol.order4") {
        c.tol.order4 = detail::parse_tolerance(key, v);
      } else if (key == "tol.integral") {
        c.tol.integral = detail::parse_tolerance(key, v);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }
  if (!have_family) throw ConfigError("missing config key 'family'");
  if (c.dims.empty()) throw ConfigError("missing config key 'n'");
  if (c.taus.empty()) throw ConfigError("missing config key 'tau'");
  if (c.ms.empty()) throw ConfigError("missing config key 'm'");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace gqem::cli
