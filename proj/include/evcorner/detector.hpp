#pragma once

// The proposed detector: STCF -> temporal array -> ordered surface ->
// sort-normalized Harris over each completed batch.

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "evcorner/counters.hpp"
#include "evcorner/events.hpp"
#include "evcorner/harris.hpp"
#include "evcorner/noise_filter.hpp"
#include "evcorner/ordered_surface.hpp"
#include "evcorner/temporal_array.hpp"

namespace evcorner {

struct CoreConfig {
  std::size_t batch = 100;  // C
  std::size_t depth = 10;   // D
  /// Separate ordered surfaces for ON and OFF events.
  bool per_polarity = false;
  HarrisParams harris;      // carries k and the decision threshold

  void validate() const {
    if (batch < 1) throw std::invalid_argument("core.C must be >= 1");
    if (depth < 1) throw std::invalid_argument("core.D must be >= 1");
    harris.validate();
  }
};

/// Scores one event against an already built surface.
template <typename EpochT>
CornerEvent evaluate_event(const BasicOrderedSurface<EpochT>& os, const Event& e, const HarrisParams& params,
                           CostCounters& counters) {
  Patch patch = extract_patch(os, e.x, e.y, params.k_patch, counters);
  sort_normalize(patch, counters);
  const double score = harris_score(patch, params, counters);
  return CornerEvent{e, score, score >= params.threshold};
}

/// Evaluates every event of row `row` in column order. `surface_for` maps
/// a polarity to the surface its patch is read from.
template <typename SurfaceFor>
std::vector<CornerEvent> detect_batch_with(const TemporalArray2D& array, std::size_t row, SurfaceFor&& surface_for,
                                           const HarrisParams& params, CostCounters& counters) {
  std::vector<CornerEvent> out;
  out.reserve(array.batch());
  for (std::size_t c = 0; c < array.batch(); ++c) {
    const auto& cell = array.cell(row, c);
    if (!cell) continue;
    out.push_back(evaluate_event(surface_for(cell->p), *cell, params, counters));
  }
  return out;
}

template <typename EpochT>
std::vector<CornerEvent> detect_batch(const TemporalArray2D& array, const BasicOrderedSurface<EpochT>& os,
                                      std::size_t row, const HarrisParams& params, CostCounters& counters) {
  return detect_batch_with(
      array, row, [&os](Polarity) -> const BasicOrderedSurface<EpochT>& { return os; }, params, counters);
}

template <typename EpochT>
std::vector<CornerEvent> detect_batch(const TemporalArray2D& array, const BasicOrderedSurface<EpochT>& os,
                                      std::size_t row, const HarrisParams& params) {
  CostCounters scratch;
  return detect_batch(array, os, row, params, scratch);
}

/// Stateful streaming detector. Results are emitted a batch at a time, in
/// insertion order; events dropped by the filter produce no result.
class CornerPipeline {
 public:
  CornerPipeline(const SensorGeometry& geometry, CoreConfig config, StcfConfig stcf = {})
      : geometry_(geometry),
        config_(std::move(config)),
        filter_(geometry, stcf),
        array_((config_.validate(), config_.depth), config_.batch),
        surfaces_{OrderedSurface(geometry), OrderedSurface(geometry)} {
    const int side = 2 * config_.harris.k_patch + 1;
    if (geometry.width < side || geometry.height < side) {
      throw std::invalid_argument("sensor must be at least (2k+1) pixels in each dimension");
    }
  }

  /// Feeds one raw event. Appends C results to `out` when it completes a batch.
  /// Returns whether the event passed the noise filter.
  bool push(const Event& e, std::vector<CornerEvent>& out) {
    if (!geometry_.contains(e.x, e.y)) throw std::out_of_range("event outside sensor geometry");
    if (filter_.classify(e) == StcfClass::Noise) {
      ++noise_events_;
      return false;
    }
    ++counters_.events_processed;
    const auto ready = array_.insert(e, counters_);
    if (ready) {
      run_batch(*ready, out);
    }
    return true;
  }

  std::vector<CornerEvent> run(std::span<const Event> events) {
    std::vector<CornerEvent> out;
    out.reserve(events.size());
    for (const auto& e : events) push(e, out);
    return out;
  }

  [[nodiscard]] const CostCounters& counters() const noexcept { return counters_; }
  [[nodiscard]] std::size_t batches() const noexcept { return batches_; }
  [[nodiscard]] std::size_t signal_events() const noexcept { return counters_.events_processed; }
  [[nodiscard]] std::size_t noise_events() const noexcept { return noise_events_; }
  [[nodiscard]] const TemporalArray2D& array() const noexcept { return array_; }
  [[nodiscard]] const CoreConfig& config() const noexcept { return config_; }

  /// The surface used for events of polarity `p` (the shared one unless
  /// per-polarity surfaces are enabled).
  [[nodiscard]] const OrderedSurface& surface(Polarity p = Polarity::Off) const noexcept {
    return surfaces_[slot(p)];
  }

 private:
  [[nodiscard]] std::size_t slot(Polarity p) const noexcept {
    return config_.per_polarity ? static_cast<std::size_t>(p) : 0;
  }

  void run_batch(std::size_t row, std::vector<CornerEvent>& out) {
    surfaces_[0].begin_build();
    if (config_.per_polarity) surfaces_[1].begin_build();
    build_ordered_surface_into(
        array_, row, [this](Polarity p) -> OrderedSurface& { return surfaces_[slot(p)]; }, counters_);
    auto results = detect_batch_with(
        array_, row, [this](Polarity p) -> const OrderedSurface& { return surfaces_[slot(p)]; }, config_.harris,
        counters_);
    out.insert(out.end(), results.begin(), results.end());
    ++batches_;
  }

  SensorGeometry geometry_;
  CoreConfig config_;
  Stcf filter_;
  TemporalArray2D array_;
  std::array<OrderedSurface, 2> surfaces_;
  CostCounters counters_;
  std::size_t batches_ = 0;
  std::size_t noise_events_ = 0;
};

inline std::vector<CornerEvent> process_stream(std::span<const Event> events, const SensorGeometry& geometry,
                                               const CoreConfig& config, const StcfConfig& stcf = {}) {
  CornerPipeline pipeline(geometry, config, stcf);
  return pipeline.run(events);
}

}  // namespace evcorner
