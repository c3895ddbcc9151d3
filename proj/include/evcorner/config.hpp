#pragma once

// Flat key=value run configuration shared by the CLI, the config file loader
// and the experiment driver.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evcorner/baselines.hpp"
#include "evcorner/cost_model.hpp"
#include "evcorner/detector.hpp"
#include "evcorner/events.hpp"
#include "evcorner/noise_filter.hpp"

namespace evcorner {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ConfigMap = std::map<std::string, std::string>;

struct ConfigKey {
  const char* name;
  const char* default_value;
  const char* help;
};

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"sensor.width", "346", "sensor width in pixels"},
      {"sensor.height", "260", "sensor height in pixels"},
      {"stcf.enabled", "true", "run the spatio-temporal correlation filter"},
      {"stcf.window_us", "10000", "filter support window (us)"},
      {"stcf.radius", "1", "filter neighbourhood radius (pixels)"},
      {"stcf.match_polarity", "false", "only same-polarity neighbours support an event"},
      {"core.C", "100", "events per batch (array columns)"},
      {"core.D", "10", "history rows used for the ordered surface"},
      {"core.k", "3", "patch half-size (patch is 2k+1 square, k <= 7)"},
      {"core.threshold", "1e15", "Harris score at or above which an event is a corner"},
      {"core.k_harris", "0.04", "Harris trace coefficient"},
      {"core.per_polarity", "false", "keep separate ordered surfaces for ON and OFF"},
      {"baseline.tos_k", "3", "luvHarris TOS update half-size"},
      {"baseline.tos_floor", "0", "TOS values decaying below this are cleared (0 = plain decrement)"},
      {"baseline.lut_period", "100", "luvHarris LUT rebuild period in events (0 = never)"},
      {"baseline.eharris_window_us", "50000", "eHarris binarization window (us)"},
      {"energy.read", "1.0", "normalized SRAM read energy"},
      {"energy.write", "3.0", "normalized SRAM write energy"},
      {"energy.reg_write", "0.3", "normalized register write energy"},
      {"cost.lut_period", "100", "LUT rebuild period assumed by the analytic energy model (0 = never)"},
      {"cost.sparsity", "0.5", "patch sparsity assumed by the analytic compute model"},
      {"cost.clock_hz", "100000000", "clock used for throughput estimates"},
      {"eval.corner_radius", "2", "synthetic ground-truth corner radius (pixels)"},
      {"eval.steps", "200", "quantile thresholds per detector in automatic sweeps"},
  };
  return keys;
}

struct RunConfig {
  SensorGeometry geometry;
  StcfConfig stcf;
  CoreConfig core;
  EHarrisConfig eharris;
  LuvHarrisConfig luvharris;
  EnergyParams cost;
  double sparsity = 0.5;
  double clock_hz = 100e6;
  double corner_radius = 2.0;
  std::size_t sweep_steps = 200;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T config_number(const ConfigMap& m, const std::string& key) {
  const std::string& s = m.at(key);
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    std::size_t used = 0;
    try {
      v = static_cast<T>(std::stod(s, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError(key + ": expected a number, got '" + s + "'");
  } else {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigError(key + ": expected an integer, got '" + s + "'");
    }
  }
  return v;
}

inline bool config_bool(const ConfigMap& m, const std::string& key) {
  const std::string& s = m.at(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + s + "'");
}

}  // namespace detail

inline ConfigMap default_config_map() {
  ConfigMap m;
  for (const auto& k : config_keys()) m[k.name] = k.default_value;
  return m;
}

inline bool is_config_key(const std::string& name) {
  for (const auto& k : config_keys()) {
    if (name == k.name) return true;
  }
  return false;
}

/// Parses "key = value" lines; '#' starts a comment.
inline ConfigMap parse_config_text(std::string_view text) {
  ConfigMap m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (!is_config_key(key)) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    m[key] = value;
  }
  return m;
}

inline ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Later maps take precedence.
inline ConfigMap merge_config(ConfigMap base, const ConfigMap& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
  return base;
}

/// Builds and validates a run configuration from a complete key map
/// (start from default_config_map()).
inline RunConfig make_run_config(const ConfigMap& in) {
  using detail::config_bool;
  using detail::config_number;
  const ConfigMap m = merge_config(default_config_map(), in);
  for (const auto& [k, v] : m) {
    if (!is_config_key(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  RunConfig c;
  try {
    c.geometry.width = config_number<int>(m, "sensor.width");
    c.geometry.height = config_number<int>(m, "sensor.height");
    if (c.geometry.width < 1 || c.geometry.height < 1) throw ConfigError("sensor dimensions must be positive");

    c.stcf.enabled = config_bool(m, "stcf.enabled");
    c.stcf.window_us = config_number<Timestamp>(m, "stcf.window_us");
    c.stcf.radius = config_number<int>(m, "stcf.radius");
    c.stcf.match_polarity = config_bool(m, "stcf.match_polarity");
    c.stcf.validate();

    const auto k = config_number<int>(m, "core.k");
    if (k < 1 || k > kMaxPatchHalfSize) throw ConfigError("core.k must be in [1, 7]");
    HarrisParams harris = HarrisParams::with_half_size(k);
    harris.threshold = config_number<double>(m, "core.threshold");
    harris.k_harris = config_number<double>(m, "core.k_harris");
    harris.validate();

    const auto batch = config_number<long long>(m, "core.C");
    const auto depth = config_number<long long>(m, "core.D");
    if (batch < 1) throw ConfigError("core.C must be >= 1");
    if (depth < 1) throw ConfigError("core.D must be >= 1");
    c.core.batch = static_cast<std::size_t>(batch);
    c.core.depth = static_cast<std::size_t>(depth);
    c.core.per_polarity = config_bool(m, "core.per_polarity");
    c.core.harris = harris;
    if (c.geometry.width < 2 * k + 1 || c.geometry.height < 2 * k + 1) {
      throw ConfigError("sensor must be at least 2k+1 pixels in each dimension");
    }

    c.eharris.harris = harris;
    c.eharris.window_us = config_number<Timestamp>(m, "baseline.eharris_window_us");
    if (c.eharris.window_us <= 0) throw ConfigError("baseline.eharris_window_us must be > 0");
    c.luvharris.harris = harris;
    c.luvharris.tos_k = config_number<int>(m, "baseline.tos_k");
    if (c.luvharris.tos_k < 1) throw ConfigError("baseline.tos_k must be >= 1");
    const auto floor = config_number<int>(m, "baseline.tos_floor");
    if (floor < 0 || floor > 255) throw ConfigError("baseline.tos_floor must be in [0, 255]");
    c.luvharris.tos_floor = static_cast<std::uint8_t>(floor);
    c.luvharris.lut_period = config_number<std::uint64_t>(m, "baseline.lut_period");

    c.cost.geometry = c.geometry;
    c.cost.batch = c.core.batch;
    c.cost.depth = c.core.depth;
    c.cost.k = k;
    c.cost.lut_period = config_number<std::uint64_t>(m, "cost.lut_period");
    c.cost.model.sram_read_cost = config_number<double>(m, "energy.read");
    c.cost.model.sram_write_cost = config_number<double>(m, "energy.write");
    c.cost.model.reg_write_cost = config_number<double>(m, "energy.reg_write");
    if (!c.cost.model.valid()) throw ConfigError("energy model needs write >= read > 0 and reg_write >= 0");
    c.sparsity = config_number<double>(m, "cost.sparsity");
    if (!(c.sparsity >= 0.0 && c.sparsity < 1.0)) throw ConfigError("cost.sparsity must be in [0, 1)");
    c.clock_hz = config_number<double>(m, "cost.clock_hz");
    if (!(c.clock_hz > 0.0)) throw ConfigError("cost.clock_hz must be > 0");

    c.corner_radius = config_number<double>(m, "eval.corner_radius");
    if (c.corner_radius < 0.0) throw ConfigError("eval.corner_radius must be >= 0");
    c.sweep_steps = config_number<std::size_t>(m, "eval.steps");
    if (c.sweep_steps < 2) throw ConfigError("eval.steps must be >= 2");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace evcorner
