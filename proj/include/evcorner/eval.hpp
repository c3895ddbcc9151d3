#pragma once

// Ground truth (synthetic moving polygons, external label files, top-quantile
// labelling of dense scores) and precision/recall evaluation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evcorner/events.hpp"

namespace evcorner {

using GroundTruth = std::vector<bool>;

// ---------------------------------------------------------------------------
// Synthetic scenes

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// A bright rigid polygon on a dark background. Vertices are given relative
/// to the rotation centre, which starts at `center` and moves with constant
/// `velocity` (px/s) while the body turns at `angular_velocity` (rad/s).
struct SyntheticScene {
  std::vector<Vec2> vertices;
  Vec2 center{173.3, 130.7};
  Vec2 velocity{0.0, 0.0};
  double angle = 0.0;
  double angular_velocity = 0.0;
  Timestamp duration_us = 1000000;
  SensorGeometry geometry;
  /// Events emitted per pixel-centre crossing, 1 us apart.
  int events_per_crossing = 1;
  /// Uniform background noise, events per second over the whole sensor.
  double noise_rate_hz = 0.0;
  /// Chebyshev distance to a vertex within which an event is a corner.
  double corner_radius = 2.0;
  /// Simulation step; crossings inside a step are located by bisection.
  Timestamp step_us = 200;

  [[nodiscard]] std::vector<Vec2> vertices_at(double t_us) const {
    const double t = t_us * 1e-6;
    const double a = angle + angular_velocity * t;
    const double ca = std::cos(a);
    const double sa = std::sin(a);
    const double cx = center.x + velocity.x * t;
    const double cy = center.y + velocity.y * t;
    std::vector<Vec2> out;
    out.reserve(vertices.size());
    for (const auto& v : vertices) out.push_back({cx + ca * v.x - sa * v.y, cy + sa * v.x + ca * v.y});
    return out;
  }

  void validate() const {
    if (vertices.size() < 3) throw std::invalid_argument("synthetic polygon needs at least 3 vertices");
    if (duration_us < 0) throw std::invalid_argument("duration must be >= 0");
    if (step_us <= 0) throw std::invalid_argument("step must be > 0");
    if (events_per_crossing < 1) throw std::invalid_argument("events_per_crossing must be >= 1");
    if (noise_rate_hz < 0.0) throw std::invalid_argument("noise rate must be >= 0");
    for (Timestamp t = 0;; t = std::min(t + step_us, duration_us)) {
      for (const auto& v : vertices_at(static_cast<double>(t))) {
        if (v.x < 0.0 || v.y < 0.0 || v.x > geometry.width - 1 || v.y > geometry.height - 1) {
          throw std::invalid_argument("polygon leaves the sensor at t=" + std::to_string(t) + "us");
        }
      }
      if (t == duration_us) break;
    }
  }
};

/// Square of side 70 px drifting across the sensor while turning slowly,
/// with about 5% background noise. Produces roughly 115k events.
inline SyntheticScene default_square_scene() {
  SyntheticScene s;
  const double h = 35.0;
  s.vertices = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
  s.center = {70.3, 90.7};
  s.velocity = {200.0, 60.0};
  s.angle = 0.1;
  s.angular_velocity = 1.0;
  s.duration_us = 1000000;
  s.events_per_crossing = 3;
  s.noise_rate_hz = 5800.0;
  return s;
}

namespace detail {

inline bool point_in_polygon(const std::vector<Vec2>& poly, double px, double py) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > py) != (b.y > py)) {
      const double x_cross = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
      if (px < x_cross) inside = !inside;
    }
  }
  return inside;
}

struct Box {
  int x0, y0, x1, y1;
};

inline Box bounding_box(const std::vector<Vec2>& poly, const SensorGeometry& g) {
  double x0 = poly[0].x, x1 = poly[0].x, y0 = poly[0].y, y1 = poly[0].y;
  for (const auto& v : poly) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  return {std::max(0, static_cast<int>(std::floor(x0)) - 1), std::max(0, static_cast<int>(std::floor(y0)) - 1),
          std::min(g.width - 1, static_cast<int>(std::ceil(x1)) + 1),
          std::min(g.height - 1, static_cast<int>(std::ceil(y1)) + 1)};
}

}  // namespace detail

struct SyntheticData {
  std::vector<Event> events;
  GroundTruth truth;
};

/// Emits an event wherever a polygon edge sweeps over a pixel centre (ON
/// when the pixel becomes covered, OFF when uncovered), plus uniform noise.
/// Edge events are corners when within `corner_radius` of a vertex at the
/// event time; noise is never a corner. Deterministic for a given seed.
inline SyntheticData generate_synthetic(const SyntheticScene& scene, std::uint64_t seed) {
  scene.validate();
  const auto& geo = scene.geometry;
  struct Tagged {
    Event e;
    bool corner;
  };
  std::vector<Tagged> out;

  std::vector<std::uint8_t> inside(geo.pixels(), 0);
  auto poly = scene.vertices_at(0.0);
  auto box = detail::bounding_box(poly, geo);
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) inside[geo.index(x, y)] = detail::point_in_polygon(poly, x, y);
  }

  auto is_corner = [&](const std::vector<Vec2>& verts, int x, int y) {
    for (const auto& v : verts) {
      if (std::max(std::abs(v.x - x), std::abs(v.y - y)) <= scene.corner_radius) return true;
    }
    return false;
  };

  for (Timestamp t0 = 0; t0 < scene.duration_us; t0 += scene.step_us) {
    const Timestamp t1 = std::min(t0 + scene.step_us, scene.duration_us);
    const auto next = scene.vertices_at(static_cast<double>(t1));
    const auto nbox = detail::bounding_box(next, geo);
    const detail::Box u{std::min(box.x0, nbox.x0), std::min(box.y0, nbox.y0), std::max(box.x1, nbox.x1),
                        std::max(box.y1, nbox.y1)};
    for (int y = u.y0; y <= u.y1; ++y) {
      for (int x = u.x0; x <= u.x1; ++x) {
        const auto i = geo.index(x, y);
        const bool now = detail::point_in_polygon(next, x, y);
        if (now == static_cast<bool>(inside[i])) continue;
        inside[i] = now;
        // Bisect for the first time the pixel centre is on the new side.
        double lo = static_cast<double>(t0);
        double hi = static_cast<double>(t1);
        for (int it = 0; it < 16; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (detail::point_in_polygon(scene.vertices_at(mid), x, y) == now) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        const auto tc = static_cast<Timestamp>(std::llround(hi));
        const bool corner = is_corner(scene.vertices_at(hi), x, y);
        for (int k = 0; k < scene.events_per_crossing; ++k) {
          Event e{tc + k, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                  now ? Polarity::On : Polarity::Off};
          out.push_back({e, corner});
        }
      }
    }
    box = nbox;
  }

  std::mt19937_64 rng(seed);
  const auto noise_count =
      static_cast<std::size_t>(std::llround(scene.noise_rate_hz * static_cast<double>(scene.duration_us) * 1e-6));
  if (scene.duration_us > 0) {
    std::uniform_int_distribution<Timestamp> t_dist(0, scene.duration_us - 1);
    std::uniform_int_distribution<int> x_dist(0, geo.width - 1);
    std::uniform_int_distribution<int> y_dist(0, geo.height - 1);
    std::uniform_int_distribution<int> p_dist(0, 1);
    for (std::size_t n = 0; n < noise_count; ++n) {
      Event e;
      e.t = t_dist(rng);
      e.x = static_cast<std::uint16_t>(x_dist(rng));
      e.y = static_cast<std::uint16_t>(y_dist(rng));
      e.p = p_dist(rng) ? Polarity::On : Polarity::Off;
      out.push_back({e, false});
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Tagged& a, const Tagged& b) { return a.e.t < b.e.t; });
  SyntheticData data;
  data.events.reserve(out.size());
  data.truth.reserve(out.size());
  for (const auto& o : out) {
    data.events.push_back(o.e);
    data.truth.push_back(o.corner);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Labels and metrics

/// Labels the top `q` fraction of scores as corners: everything at or above
/// the score of the ceil(q*n)-th largest entry, so ties at the cutoff are
/// all included.
inline GroundTruth label_top_quantile(std::span<const double> scores, double q) {
  if (scores.empty()) throw std::invalid_argument("cannot label an empty score list");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile must be in (0, 1)");
  std::vector<double> sorted(scores.begin(), scores.end());
  const auto n = sorted.size();
  auto m = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
  m = std::clamp<std::size_t>(m, 1, n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m - 1), sorted.end(),
                   std::greater<>());
  const double cutoff = sorted[m - 1];
  GroundTruth truth(n);
  for (std::size_t i = 0; i < n; ++i) truth[i] = scores[i] >= cutoff;
  return truth;
}

struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 0.0;
};

inline Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  Metrics m{tp, fp, fn, tn};
  m.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

/// Precision is 1 with no detections, recall is 1 with no positives.
inline Metrics evaluate(const std::vector<bool>& detections, const GroundTruth& truth) {
  if (detections.size() != truth.size()) {
    throw std::invalid_argument("detections (" + std::to_string(detections.size()) + ") and truth (" +
                                std::to_string(truth.size()) + ") differ in length");
  }
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (detections[i]) {
      truth[i] ? ++tp : ++fp;
    } else {
      truth[i] ? ++fn : ++tn;
    }
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

struct PrPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 1.0;
};

/// One point per threshold, detecting score >= threshold. Runs in
/// O((n + T) log n) by sorting the scores once.
inline std::vector<PrPoint> sweep_threshold(std::span<const double> scores, const GroundTruth& truth,
                                            std::span<const double> thresholds) {
  if (scores.size() != truth.size()) {
    throw std::invalid_argument("scores (" + std::to_string(scores.size()) + ") and truth (" +
                                std::to_string(truth.size()) + ") differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> sorted(scores.size());
  std::vector<std::size_t> positives_prefix(scores.size() + 1, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted[i] = scores[order[i]];
    positives_prefix[i + 1] = positives_prefix[i] + (truth[order[i]] ? 1 : 0);
  }
  const std::size_t total_pos = positives_prefix.back();
  const std::size_t n = scores.size();

  std::vector<PrPoint> out;
  out.reserve(thresholds.size());
  for (double thr : thresholds) {
    // Count of scores >= thr in a descending array.
    const auto detected = static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), thr, [](double v, double s) { return v > s; }) -
        sorted.begin());
    const std::size_t tp = positives_prefix[detected];
    const std::size_t fp = detected - tp;
    const std::size_t fn = total_pos - tp;
    const auto m = metrics_from_counts(tp, fp, fn, n - detected - fn);
    out.push_back({thr, m.precision, m.recall});
  }
  return out;
}

/// Area under the precision-recall curve by the trapezoid rule over the
/// points sorted by recall.
inline double pr_auc(std::vector<PrPoint> points) {
  std::sort(points.begin(), points.end(), [](const PrPoint& a, const PrPoint& b) {
    return a.recall != b.recall ? a.recall < b.recall : a.precision > b.precision;
  });
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].recall - points[i - 1].recall) * 0.5 * (points[i].precision + points[i - 1].precision);
  }
  return area;
}

/// Non-decreasing thresholds at `steps` evenly spaced quantiles of the
/// scores, plus one value above the maximum (no detections). Repeated
/// quantiles are kept so every detector gets the same number of points.
inline std::vector<double> quantile_thresholds(std::span<const double> scores, std::size_t steps) {
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  if (sorted.empty()) return out;
  steps = std::max<std::size_t>(steps, 2);
  for (std::size_t i = 0; i < steps; ++i) {
    const auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(i) *
                                                           static_cast<double>(sorted.size() - 1) /
                                                           static_cast<double>(steps - 1)));
    out.push_back(sorted[idx]);
  }
  const double top = sorted.back();
  out.push_back(top + std::max(1.0, std::abs(top)));
  return out;
}

// ---------------------------------------------------------------------------
// Label files: one "0" or "1" per line.

inline void write_labels(const std::string& path, const GroundTruth& truth) {
  auto out = detail::open_output(path);
  std::string buf;
  buf.reserve(truth.size() * 2);
  for (bool b : truth) {
    buf += b ? '1' : '0';
    buf += '\n';
  }
  out << buf;
  if (!out) throw IoError("write failed for '" + path + "'");
}

/// Reads a label file. When `expected` is given the label count must match
/// it; `event_file` names the stream in the error message.
inline GroundTruth load_labels(const std::string& path, std::optional<std::size_t> expected = std::nullopt,
                               const std::string& event_file = "event file") {
  auto in = detail::open_input(path);
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    const auto fields = detail::split_ws(line);
    if (fields.size() != 1 || (fields[0] != "0" && fields[0] != "1")) {
      throw ParseError(line_no, path + ": label must be 0 or 1");
    }
    truth.push_back(fields[0] == "1");
  }
  if (expected && truth.size() != *expected) {
    throw ParseError(0, path + ": " + std::to_string(truth.size()) + " labels but " + event_file + " has " +
                            std::to_string(*expected) + " events");
  }
  return truth;
}

}  // namespace evcorner
