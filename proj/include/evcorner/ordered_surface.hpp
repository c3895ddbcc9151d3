#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "evcorner/counters.hpp"
#include "evcorner/events.hpp"
#include "evcorner/harris.hpp"
#include "evcorner/temporal_array.hpp"

namespace evcorner {

/// Per-pixel global order values of the events currently in history; larger
/// means more recent, 0 means no event. Each build bumps an epoch counter
/// instead of wiping the grid: a pixel only holds a value if it was written
/// during the current epoch.
template <typename EpochT = std::uint32_t>
class BasicOrderedSurface {
 public:
  explicit BasicOrderedSurface(const SensorGeometry& geometry)
      : geometry_(geometry), order_(geometry.pixels(), 0), epoch_(geometry.pixels(), 0) {}

  /// Logically clears the surface. On epoch wraparound the tags are wiped
  /// for real so stale pixels cannot alias the new epoch.
  void begin_build() {
    if (current_epoch_ == std::numeric_limits<EpochT>::max()) {
      std::fill(epoch_.begin(), epoch_.end(), EpochT{0});
      current_epoch_ = 0;
      ++full_clears_;
    }
    ++current_epoch_;
  }

  void write(int x, int y, std::uint32_t order) {
    const auto i = geometry_.index(x, y);
    order_[i] = order;
    epoch_[i] = current_epoch_;
  }

  [[nodiscard]] std::uint32_t value(int x, int y) const {
    if (!geometry_.contains(x, y)) return 0;
    const auto i = geometry_.index(x, y);
    return epoch_[i] == current_epoch_ && current_epoch_ != 0 ? order_[i] : 0;
  }

  [[nodiscard]] const SensorGeometry& geometry() const noexcept { return geometry_; }
  [[nodiscard]] EpochT current_epoch() const noexcept { return current_epoch_; }
  [[nodiscard]] std::size_t full_clears() const noexcept { return full_clears_; }

 private:
  SensorGeometry geometry_;
  std::vector<std::uint32_t> order_;
  std::vector<EpochT> epoch_;
  EpochT current_epoch_ = 0;
  std::size_t full_clears_ = 0;
};

using OrderedSurface = BasicOrderedSurface<>;

/// Builds the surface(s) after row `ready_row` completed. Rows are walked
/// circularly from (ready_row + 2) mod (D+1) up to ready_row inclusive, so
/// exactly D rows are used and the next insertion row (holding the oldest
/// data) is skipped. `surface_for(polarity)` selects the destination, which
/// allows one surface per polarity. Every destination must already have had
/// begin_build() called. Returns the last order value assigned.
template <typename SurfaceFor>
std::uint32_t build_ordered_surface_into(const TemporalArray2D& array, std::size_t ready_row, SurfaceFor&& surface_for,
                                    CostCounters& counters) {
  const std::size_t rows = array.rows();
  std::uint32_t order = 1;
  std::size_t r = (ready_row + 2) % rows;
  for (std::size_t n = 0; n < array.depth(); ++n, r = (r + 1) % rows) {
    for (std::size_t c = 0; c < array.batch(); ++c) {
      const auto& cell = array.cell(r, c);
      if (!cell) continue;
      surface_for(cell->p).write(cell->x, cell->y, order++);
      ++counters.sram_writes;
    }
  }
  return order - 1;
}

template <typename EpochT>
std::uint32_t build_ordered_surface(const TemporalArray2D& array, std::size_t ready_row,
                                    BasicOrderedSurface<EpochT>& os, CostCounters& counters) {
  os.begin_build();
  return build_ordered_surface_into(
      array, ready_row, [&os](Polarity) -> BasicOrderedSurface<EpochT>& { return os; }, counters);
}

template <typename EpochT>
std::uint32_t build_ordered_surface(const TemporalArray2D& array, std::size_t ready_row,
                                    BasicOrderedSurface<EpochT>& os) {
  CostCounters scratch;
  return build_ordered_surface(array, ready_row, os, scratch);
}

/// Copies the (2k+1)^2 window centred on (x, y). Pixels outside the sensor
/// read as 0. The whole window is charged as reads.
template <typename EpochT>
Patch extract_patch(const BasicOrderedSurface<EpochT>& os, int x, int y, int k, CostCounters& counters) {
  Patch patch(k);
  for (int r = -k; r <= k; ++r) {
    for (int c = -k; c <= k; ++c) {
      patch.at(c + k, r + k) = static_cast<std::int32_t>(os.value(x + c, y + r));
    }
  }
  counters.sram_reads += static_cast<std::uint64_t>(patch.cells());
  return patch;
}

template <typename EpochT>
Patch extract_patch(const BasicOrderedSurface<EpochT>& os, int x, int y, int k) {
  CostCounters scratch;
  return extract_patch(os, x, y, k, scratch);
}

}  // namespace evcorner
