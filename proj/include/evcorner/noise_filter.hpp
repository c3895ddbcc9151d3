#pragma once

// Spatio-temporal correlation filter (STCF): an event is signal when some
// other pixel in its neighbourhood fired recently.

#include <algorithm>
#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "evcorner/events.hpp"

namespace evcorner {

struct StcfConfig {
  bool enabled = true;
  Timestamp window_us = 10000;
  int radius = 1;
  /// Only same-polarity neighbours count as support.
  bool match_polarity = false;

  void validate() const {
    if (window_us <= 0) throw std::invalid_argument("stcf.window_us must be > 0");
    if (radius < 1) throw std::invalid_argument("stcf.radius must be >= 1");
  }
};

enum class StcfClass { Signal, Noise };

class Stcf {
 public:
  static constexpr Timestamp kNever = -1;

  Stcf(const SensorGeometry& geometry, StcfConfig config) : geometry_(geometry), config_(config) {
    config_.validate();
    for (auto& grid : last_time_) grid.assign(geometry_.pixels(), kNever);
  }

  /// Classifies `e` and records its timestamp at its own pixel.
  StcfClass classify(const Event& e) {
    const auto pol = static_cast<std::size_t>(e.p);
    StcfClass result = StcfClass::Signal;
    if (config_.enabled) {
      result = supported(e) ? StcfClass::Signal : StcfClass::Noise;
    }
    auto& slot = last_time_[pol][geometry_.index(e.x, e.y)];
    slot = std::max(slot, e.t);
    return result;
  }

  /// Last timestamp at (x, y) over both polarities, kNever if none.
  [[nodiscard]] Timestamp last_time(int x, int y) const {
    const auto i = geometry_.index(x, y);
    return std::max(last_time_[0][i], last_time_[1][i]);
  }

  [[nodiscard]] const StcfConfig& config() const noexcept { return config_; }

 private:
  [[nodiscard]] bool supported(const Event& e) const {
    const int r = config_.radius;
    const int x0 = std::max(0, e.x - r);
    const int x1 = std::min(geometry_.width - 1, e.x + r);
    const int y0 = std::max(0, e.y - r);
    const int y1 = std::min(geometry_.height - 1, e.y + r);
    const auto pol = static_cast<std::size_t>(e.p);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (x == e.x && y == e.y) continue;
        const auto i = geometry_.index(x, y);
        for (std::size_t p = 0; p < 2; ++p) {
          if (config_.match_polarity && p != pol) continue;
          const Timestamp t = last_time_[p][i];
          if (t != kNever && e.t - t <= config_.window_us) return true;
        }
      }
    }
    return false;
  }

  SensorGeometry geometry_;
  StcfConfig config_;
  std::array<std::vector<Timestamp>, 2> last_time_;
};

/// Runs a fresh filter over `events` and returns the per-event classes.
inline std::vector<StcfClass> stcf_classify_stream(std::span<const Event> events, const SensorGeometry& geometry,
                                                   const StcfConfig& config) {
  Stcf filter(geometry, config);
  std::vector<StcfClass> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(filter.classify(e));
  return out;
}

/// Signal events only, in stream order.
inline std::vector<Event> stcf_filter(std::span<const Event> events, const SensorGeometry& geometry,
                                      const StcfConfig& config) {
  Stcf filter(geometry, config);
  std::vector<Event> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    if (filter.classify(e) == StcfClass::Signal) out.push_back(e);
  }
  return out;
}

}  // namespace evcorner
