#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "evcorner/counters.hpp"
#include "evcorner/events.hpp"

namespace evcorner {

/// (D+1) x C circular store of recent signal events. Events are written
/// row-major; when a row fills up it becomes a batch for detection and the
/// insertion point wraps to the next row. D rows form the history used by
/// the ordered surface; the extra row receives new events meanwhile.
///
/// Only the coordinates (and polarity) feed the ordered surface. The full
/// event is kept so detection results can report their timestamp.
class TemporalArray2D {
 public:
  TemporalArray2D(std::size_t depth, std::size_t batch) : depth_(depth), batch_(batch) {
    if (depth < 1) throw std::invalid_argument("core.D must be >= 1");
    if (batch < 1) throw std::invalid_argument("core.C must be >= 1");
    cells_.assign((depth_ + 1) * batch_, std::nullopt);
  }

  /// Stores `e` at the insertion point. Returns the index of the row that
  /// just filled up, or nullopt while the current row still has room.
  std::optional<std::size_t> insert(const Event& e, CostCounters& counters) {
    cells_[row_ptr_ * batch_ + col_ptr_] = e;
    ++counters.reg_writes;
    ++inserted_;
    if (++col_ptr_ < batch_) return std::nullopt;
    const std::size_t ready = row_ptr_;
    col_ptr_ = 0;
    row_ptr_ = (row_ptr_ + 1) % rows();
    return ready;
  }

  std::optional<std::size_t> insert(const Event& e) {
    CostCounters scratch;
    return insert(e, scratch);
  }

  [[nodiscard]] const std::optional<Event>& cell(std::size_t row, std::size_t col) const {
    return cells_.at(row * batch_ + col);
  }

  [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
  [[nodiscard]] std::size_t batch() const noexcept { return batch_; }
  [[nodiscard]] std::size_t rows() const noexcept { return depth_ + 1; }
  [[nodiscard]] std::size_t row_ptr() const noexcept { return row_ptr_; }
  [[nodiscard]] std::size_t col_ptr() const noexcept { return col_ptr_; }
  [[nodiscard]] std::size_t inserted() const noexcept { return inserted_; }

  [[nodiscard]] std::size_t occupied() const noexcept {
    std::size_t n = 0;
    for (const auto& c : cells_) n += c.has_value();
    return n;
  }

 private:
  std::size_t depth_;
  std::size_t batch_;
  std::size_t row_ptr_ = 0;
  std::size_t col_ptr_ = 0;
  std::size_t inserted_ = 0;
  std::vector<std::optional<Event>> cells_;
};

}  // namespace evcorner
