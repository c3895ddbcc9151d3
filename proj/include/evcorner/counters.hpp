#pragma once

#include <cstdint>

namespace evcorner {

/// Memory and compute tallies accumulated by a pipeline instance. Every field
/// only grows; reset() clears them all at once.
struct CostCounters {
  std::uint64_t sram_reads = 0;
  std::uint64_t sram_writes = 0;
  std::uint64_t reg_writes = 0;
  std::uint64_t macs = 0;
  std::uint64_t sort_ops = 0;
  std::uint64_t events_processed = 0;

  void reset() noexcept { *this = CostCounters{}; }

  CostCounters& operator+=(const CostCounters& o) noexcept {
    sram_reads += o.sram_reads;
    sram_writes += o.sram_writes;
    reg_writes += o.reg_writes;
    macs += o.macs;
    sort_ops += o.sort_ops;
    events_processed += o.events_processed;
    return *this;
  }

  // Difference of two snapshots of the same counter set (later - earlier).
  friend CostCounters operator-(const CostCounters& later, const CostCounters& earlier) noexcept {
    CostCounters d;
    d.sram_reads = later.sram_reads - earlier.sram_reads;
    d.sram_writes = later.sram_writes - earlier.sram_writes;
    d.reg_writes = later.reg_writes - earlier.reg_writes;
    d.macs = later.macs - earlier.macs;
    d.sort_ops = later.sort_ops - earlier.sort_ops;
    d.events_processed = later.events_processed - earlier.events_processed;
    return d;
  }

  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

/// Normalized per-access energies.
struct EnergyModel {
  double sram_read_cost = 1.0;
  double sram_write_cost = 3.0;
  double reg_write_cost = 0.3;

  [[nodiscard]] bool valid() const noexcept {
    return sram_read_cost > 0.0 && sram_write_cost >= sram_read_cost && reg_write_cost >= 0.0;
  }

  [[nodiscard]] double energy(const CostCounters& c) const noexcept {
    return static_cast<double>(c.sram_reads) * sram_read_cost + static_cast<double>(c.sram_writes) * sram_write_cost +
           static_cast<double>(c.reg_writes) * reg_write_cost;
  }
};

}  // namespace evcorner
