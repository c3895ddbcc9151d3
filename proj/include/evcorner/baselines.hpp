#pragma once

// Reference detectors used for comparison: eHarris on a binarized surface of
// active events, and a deterministic luvHarris emulation (threshold-ordinal
// surface plus a Harris lookup table rebuilt every N events).

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "evcorner/counters.hpp"
#include "evcorner/events.hpp"
#include "evcorner/harris.hpp"

namespace evcorner {

// ---------------------------------------------------------------------------
// eHarris

/// Surface of active events: last timestamp per pixel.
class Sae {
 public:
  static constexpr Timestamp kNever = -1;

  explicit Sae(const SensorGeometry& geometry, bool per_polarity = false)
      : geometry_(geometry), per_polarity_(per_polarity) {
    for (auto& g : last_) g.assign(geometry.pixels(), kNever);
  }

  void update(const Event& e, CostCounters& counters) {
    auto& slot = last_[surface(e.p)][geometry_.index(e.x, e.y)];
    slot = std::max(slot, e.t);
    ++counters.sram_writes;
  }

  [[nodiscard]] Timestamp at(int x, int y, Polarity p = Polarity::Off) const {
    if (!geometry_.contains(x, y)) return kNever;
    return last_[surface(p)][geometry_.index(x, y)];
  }

  [[nodiscard]] const SensorGeometry& geometry() const noexcept { return geometry_; }

 private:
  [[nodiscard]] std::size_t surface(Polarity p) const noexcept {
    return per_polarity_ ? static_cast<std::size_t>(p) : 0;
  }

  SensorGeometry geometry_;
  bool per_polarity_;
  std::array<std::vector<Timestamp>, 2> last_;
};

/// Binary window around `e`: 255 where the pixel fired within `window_us`
/// of e.t, 0 elsewhere.
inline Patch binarized_sae_patch(const Sae& sae, const Event& e, int k, Timestamp window_us, CostCounters& counters) {
  Patch patch(k);
  const Timestamp cutoff = e.t - window_us;
  for (int r = -k; r <= k; ++r) {
    for (int c = -k; c <= k; ++c) {
      const Timestamp t = sae.at(e.x + c, e.y + r, e.p);
      patch.at(c + k, r + k) = (t != Sae::kNever && t >= cutoff) ? 255 : 0;
    }
  }
  counters.sram_reads += static_cast<std::uint64_t>(patch.cells());
  return patch;
}

/// Scores `e` on the binarized SAE. The SAE must already contain `e`.
inline CornerEvent eharris_detect(const Sae& sae, const Event& e, const HarrisParams& params, Timestamp window_us,
                                  CostCounters& counters) {
  const Patch patch = binarized_sae_patch(sae, e, params.k_patch, window_us, counters);
  const double score = harris_score(patch, params, counters);
  return CornerEvent{e, score, score >= params.threshold};
}

struct EHarrisConfig {
  Timestamp window_us = 50000;
  bool per_polarity = false;
  HarrisParams harris;
};

class EHarrisDetector {
 public:
  EHarrisDetector(const SensorGeometry& geometry, EHarrisConfig config)
      : config_(std::move(config)), sae_(geometry, config_.per_polarity) {
    config_.harris.validate();
    if (config_.window_us <= 0) throw std::invalid_argument("baseline.eharris_window_us must be > 0");
  }

  CornerEvent process(const Event& e) {
    ++counters_.events_processed;
    sae_.update(e, counters_);
    return eharris_detect(sae_, e, config_.harris, config_.window_us, counters_);
  }

  std::vector<CornerEvent> run(std::span<const Event> events) {
    std::vector<CornerEvent> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(process(e));
    return out;
  }

  [[nodiscard]] const CostCounters& counters() const noexcept { return counters_; }
  [[nodiscard]] const Sae& sae() const noexcept { return sae_; }

 private:
  EHarrisConfig config_;
  Sae sae_;
  CostCounters counters_;
};

// ---------------------------------------------------------------------------
// luvHarris emulation

/// 8-bit newness surface. Storage carries a k_tos border so the update
/// window is always a full (2k_tos+1)^2 block of memory; the border stays 0
/// and reads back as "no event".
class Tos {
 public:
  /// `floor`: neighbours that decay below this value are cleared to 0
  /// (0 keeps the plain saturating decrement).
  Tos(const SensorGeometry& geometry, int k_tos, std::uint8_t floor = 0)
      : geometry_(geometry), k_(k_tos), floor_(floor) {
    if (k_tos < 1) throw std::invalid_argument("baseline.tos_k must be >= 1");
    stride_ = static_cast<std::size_t>(geometry.width + 2 * k_);
    cells_.assign(stride_ * static_cast<std::size_t>(geometry.height + 2 * k_), 0);
  }

  /// Centre <- 255, every other pixel of the window decays by one (floored
  /// at 0). Charged as one read and one write per window cell.
  void update(const Event& e, CostCounters& counters) {
    const int side = 2 * k_ + 1;
    for (int r = -k_; r <= k_; ++r) {
      std::uint8_t* row = &cells_[slot(e.x - k_, e.y + r)];
      for (int c = 0; c < side; ++c) {
        if (row[c] > 0) --row[c];
        if (row[c] < floor_) row[c] = 0;
      }
    }
    cells_[slot(e.x, e.y)] = 255;
    const auto window = static_cast<std::uint64_t>(side * side);
    counters.sram_reads += window;
    counters.sram_writes += window;
  }

  [[nodiscard]] std::uint8_t at(int x, int y) const {
    if (!geometry_.contains(x, y)) return 0;
    return cells_[slot(x, y)];
  }

  [[nodiscard]] int k() const noexcept { return k_; }
  [[nodiscard]] const SensorGeometry& geometry() const noexcept { return geometry_; }

 private:
  [[nodiscard]] std::size_t slot(int x, int y) const noexcept {
    return static_cast<std::size_t>(y + k_) * stride_ + static_cast<std::size_t>(x + k_);
  }

  SensorGeometry geometry_;
  int k_;
  std::uint8_t floor_;
  std::size_t stride_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Harris moments at every pixel of an 8-bit image, identical to running
/// harris_moments on the zero-padded (2k+1)^2 window around each pixel.
/// Gradients are computed once and scattered into the smoothing windows of
/// the pixels they affect, skipping positions where both gradients vanish.
template <typename PixelAt>
std::vector<HarrisMoments> dense_harris_moments(const SensorGeometry& geometry, PixelAt&& pixel_at,
                                                const HarrisParams& params) {
  const int w = geometry.width;
  const int h = geometry.height;
  const int half = params.k_patch - 1;  // gradient grid half-size
  const int g = params.grid_side();
  std::vector<HarrisMoments> out(geometry.pixels());

  auto value = [&](int x, int y) -> std::int64_t {
    return (x < 0 || y < 0 || x >= w || y >= h) ? 0 : static_cast<std::int64_t>(pixel_at(x, y));
  };

  for (int gy = -half; gy < h + half; ++gy) {
    for (int gx = -half; gx < w + half; ++gx) {
      std::int64_t sx = 0;
      std::int64_t sy = 0;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          const std::int64_t v = value(gx - 1 + c, gy - 1 + r);
          if (v == 0) continue;
          sx += v * params.sobel_x[static_cast<std::size_t>(r * 3 + c)];
          sy += v * params.sobel_y[static_cast<std::size_t>(r * 3 + c)];
        }
      }
      if (sx == 0 && sy == 0) continue;
      const std::int64_t xx = sx * sx;
      const std::int64_t yy = sy * sy;
      const std::int64_t xy = sx * sy;
      const int py0 = std::max(0, gy - half);
      const int py1 = std::min(h - 1, gy + half);
      const int px0 = std::max(0, gx - half);
      const int px1 = std::min(w - 1, gx + half);
      for (int py = py0; py <= py1; ++py) {
        const int j = gy - py + half;
        for (int px = px0; px <= px1; ++px) {
          const int i = gx - px + half;
          const std::int64_t wgt = params.gaussian[static_cast<std::size_t>(j * g + i)];
          auto& m = out[geometry.index(px, py)];
          m.sxx += wgt * xx;
          m.syy += wgt * yy;
          m.sxy += wgt * xy;
        }
      }
    }
  }
  return out;
}

/// Per-pixel 32-bit Harris score table.
class HarrisLut {
 public:
  explicit HarrisLut(const SensorGeometry& geometry) : geometry_(geometry), scores_(geometry.pixels(), 0.0F) {}

  void rebuild(const Tos& tos, const HarrisParams& params, CostCounters& counters) {
    const auto moments = dense_harris_moments(
        geometry_, [&tos](int x, int y) { return tos.at(x, y); }, params);
    for (std::size_t i = 0; i < moments.size(); ++i) {
      scores_[i] = static_cast<float>(harris_response(moments[i], params.k_harris));
    }
    counters.sram_writes += geometry_.pixels();
    counters.macs += geometry_.pixels() * harris_mac_count(params.k_patch);
    ++rebuilds_;
  }

  [[nodiscard]] float lookup(int x, int y, CostCounters& counters) const {
    ++counters.sram_reads;
    return scores_[geometry_.index(x, y)];
  }

  [[nodiscard]] std::size_t rebuilds() const noexcept { return rebuilds_; }

 private:
  SensorGeometry geometry_;
  std::vector<float> scores_;
  std::size_t rebuilds_ = 0;
};

struct LuvHarrisConfig {
  int tos_k = 3;
  std::uint8_t tos_floor = 0;
  /// LUT rebuild period in signal events; 0 means never rebuild.
  std::uint64_t lut_period = 100;
  HarrisParams harris;
};

class LuvHarrisDetector {
 public:
  LuvHarrisDetector(const SensorGeometry& geometry, LuvHarrisConfig config)
      : config_(std::move(config)), tos_(geometry, config_.tos_k, config_.tos_floor), lut_(geometry) {
    config_.harris.validate();
  }

  CornerEvent process(const Event& e) {
    ++counters_.events_processed;
    tos_.update(e, counters_);
    if (config_.lut_period != 0 && counters_.events_processed % config_.lut_period == 0) {
      lut_.rebuild(tos_, config_.harris, counters_);
    }
    const double score = lut_.lookup(e.x, e.y, counters_);
    return CornerEvent{e, score, score >= config_.harris.threshold};
  }

  std::vector<CornerEvent> run(std::span<const Event> events) {
    std::vector<CornerEvent> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(process(e));
    return out;
  }

  [[nodiscard]] const CostCounters& counters() const noexcept { return counters_; }
  [[nodiscard]] const Tos& tos() const noexcept { return tos_; }
  [[nodiscard]] const HarrisLut& lut() const noexcept { return lut_; }

 private:
  LuvHarrisConfig config_;
  Tos tos_;
  HarrisLut lut_;
  CostCounters counters_;
};

inline std::vector<CornerEvent> luvharris_emulated(std::span<const Event> events, const SensorGeometry& geometry,
                                                   const LuvHarrisConfig& config) {
  LuvHarrisDetector detector(geometry, config);
  return detector.run(events);
}

}  // namespace evcorner
