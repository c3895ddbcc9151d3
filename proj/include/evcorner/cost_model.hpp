#pragma once

// Analytic and measured resource accounting: per-event memory-access energy,
// memory footprint, per-event compute and Harris evaluation throughput for
// the ordered-surface detector versus luvHarris.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evcorner/counters.hpp"
#include "evcorner/events.hpp"
#include "evcorner/harris.hpp"

namespace evcorner {

/// Multiply-accumulates of one 7x7 Harris evaluation.
inline constexpr std::uint64_t kHarrisMacs = harris_mac_count(3);
/// Cycles per evaluation on an in-memory-computing macro: one for all
/// convolutions, 25 for the products, one for smoothing.
inline constexpr std::uint64_t kImcCyclesPerEval = 27;

/// n log2 n comparisons for sorting the n = (1-S)P non-zero patch entries.
inline double sort_op_count(double sparsity, double patch_cells) {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) throw std::invalid_argument("sparsity must be in [0, 1)");
  if (!(patch_cells >= 1.0)) throw std::invalid_argument("patch size must be >= 1");
  const double n = (1.0 - sparsity) * patch_cells;
  if (n < 1.0) return 0.0;
  return n * std::log2(n);
}

template <typename T>
struct Comparison {
  T ours{};
  T luvharris{};
  double ratio = 0.0;  // luvharris / ours
};

struct EnergyParams {
  SensorGeometry geometry;
  std::size_t batch = 100;  // C
  std::size_t depth = 10;   // D
  int k = 3;
  /// luvHarris LUT rebuild period; 0 means the LUT is never rebuilt.
  std::uint64_t lut_period = 100;
  EnergyModel model;
};

inline double patch_cells(int k) { return static_cast<double>((2 * k + 1) * (2 * k + 1)); }

/// Ours: one array (register) write, D lifetime surface writes, one patch
/// of reads. luvHarris: read-modify-write of the TOS window, one LUT read
/// and the LUT rebuild writes amortized over the rebuild period.
inline Comparison<double> analytic_energy_per_event(const EnergyParams& p) {
  const double cells = patch_cells(p.k);
  const auto& m = p.model;
  Comparison<double> out;
  out.ours = m.reg_write_cost + static_cast<double>(p.depth) * m.sram_write_cost + cells * m.sram_read_cost;
  const double rebuild = p.lut_period == 0 ? 0.0
                                           : static_cast<double>(p.geometry.pixels()) /
                                                 static_cast<double>(p.lut_period) * m.sram_write_cost;
  out.luvharris = cells * (m.sram_read_cost + m.sram_write_cost) + m.sram_read_cost + rebuild;
  out.ratio = out.luvharris / out.ours;
  return out;
}

struct FootprintReport {
  Comparison<double> real_bits;     // log2 widths kept fractional
  Comparison<double> integer_bits;  // log2 widths rounded up
};

/// luvHarris keeps an 8-bit TOS and a 32-bit LUT per pixel. Ours keeps the
/// (D+1)C coordinate array and one order value wide enough for C(D+1) per pixel.
inline FootprintReport analytic_footprint_bits(const SensorGeometry& geometry, std::size_t batch, std::size_t depth) {
  const double w = geometry.width;
  const double h = geometry.height;
  const double slots = static_cast<double>(batch) * static_cast<double>(depth + 1);
  const double luv = w * h * (8.0 + 32.0);

  FootprintReport r;
  r.real_bits.luvharris = luv;
  r.real_bits.ours = slots * (std::log2(w) + std::log2(h)) + w * h * std::log2(slots);
  r.real_bits.ratio = luv / r.real_bits.ours;

  auto bits = [](double v) { return v <= 1.0 ? 0.0 : std::ceil(std::log2(v)); };
  r.integer_bits.luvharris = luv;
  r.integer_bits.ours = slots * (bits(w) + bits(h)) + w * h * bits(slots);
  // A 1x1, C(D+1)=1 configuration needs no address bits at all.
  r.integer_bits.ratio = r.integer_bits.ours > 0.0 ? luv / r.integer_bits.ours
                                                   : std::numeric_limits<double>::infinity();
  return r;
}

struct ComputeReport {
  double ours = 0.0;          // Harris MACs + sort comparisons per event
  double luvharris_tos = 0.0; // compare + window decrements per event
  double ratio = 0.0;         // ours / luvharris_tos
  double claimed_ratio = 2.3;
  std::string note = "accounting basis unstated for the claimed ratio";
};

inline ComputeReport analytic_compute_per_event(double sparsity, int k) {
  const double cells = patch_cells(k);
  ComputeReport r;
  r.ours = static_cast<double>(harris_mac_count(k)) + sort_op_count(sparsity, cells);
  r.luvharris_tos = 1.0 + cells;
  r.ratio = r.ours / r.luvharris_tos;
  return r;
}

enum class ThroughputMode { Serial, Imc };

/// Corner evaluations per second: one MAC per cycle when serial, a fixed
/// 27-cycle evaluation on an in-memory-computing macro.
inline double throughput_estimate(double clock_hz, ThroughputMode mode) {
  if (!(clock_hz > 0.0)) throw std::invalid_argument("clock must be > 0");
  return mode == ThroughputMode::Serial ? clock_hz / static_cast<double>(kHarrisMacs)
                                        : clock_hz / static_cast<double>(kImcCyclesPerEval);
}

struct MeasuredEnergy {
  double ours = 0.0;
  double luvharris = 0.0;
  double ratio = 0.0;
  double ours_os_writes_per_event = 0.0;
  double luv_writes_per_event = 0.0;
  std::uint64_t events = 0;
};

/// Per-event energies from instrumented counters. Both counter sets must
/// cover the same signal stream.
inline MeasuredEnergy measured_energy(const CostCounters& ours, const CostCounters& luv, const EnergyModel& model) {
  if (ours.events_processed != luv.events_processed) {
    throw std::invalid_argument("counter sets cover different event counts (" +
                                std::to_string(ours.events_processed) + " vs " +
                                std::to_string(luv.events_processed) + ")");
  }
  if (ours.events_processed == 0) throw std::invalid_argument("no events processed; nothing to report");
  const auto n = static_cast<double>(ours.events_processed);
  MeasuredEnergy m;
  m.events = ours.events_processed;
  m.ours = model.energy(ours) / n;
  m.luvharris = model.energy(luv) / n;
  m.ratio = m.luvharris / m.ours;
  m.ours_os_writes_per_event = static_cast<double>(ours.sram_writes) / n;
  m.luv_writes_per_event = static_cast<double>(luv.sram_writes) / n;
  return m;
}

struct CostReport {
  EnergyParams params;
  Comparison<double> energy;
  FootprintReport footprint;
  ComputeReport compute;
  double sparsity = 0.5;
  double clock_hz = 100e6;
  double ceps_serial = 0.0;
  double ceps_imc = 0.0;
  /// (lut_period, energy ratio) pairs.
  std::vector<std::pair<std::uint64_t, double>> period_sensitivity;
  std::optional<MeasuredEnergy> measured;
};

inline CostReport analytic_report(const EnergyParams& params, double sparsity = 0.5, double clock_hz = 100e6) {
  CostReport r;
  r.params = params;
  r.sparsity = sparsity;
  r.clock_hz = clock_hz;
  r.energy = analytic_energy_per_event(params);
  r.footprint = analytic_footprint_bits(params.geometry, params.batch, params.depth);
  r.compute = analytic_compute_per_event(sparsity, params.k);
  r.ceps_serial = throughput_estimate(clock_hz, ThroughputMode::Serial);
  r.ceps_imc = throughput_estimate(clock_hz, ThroughputMode::Imc);
  for (std::uint64_t n : {1ULL, 10ULL, 50ULL, 100ULL, 200ULL, 500ULL, 1000ULL, 10000ULL, 0ULL}) {
    EnergyParams q = params;
    q.lut_period = n;
    r.period_sensitivity.emplace_back(n, analytic_energy_per_event(q).ratio);
  }
  return r;
}

/// Analytic report plus measured figures from the two instrumented runs.
inline CostReport measured_report(const CostCounters& ours, const CostCounters& luv, const EnergyParams& params,
                                  double sparsity = 0.5, double clock_hz = 100e6) {
  CostReport r = analytic_report(params, sparsity, clock_hz);
  r.measured = measured_energy(ours, luv, params.model);
  return r;
}

inline nlohmann::json to_json(const CostReport& r) {
  using nlohmann::json;
  auto cmp = [](const Comparison<double>& c) { return json{{"ours", c.ours}, {"luvharris", c.luvharris}, {"ratio", c.ratio}}; };
  json j;
  j["params"] = {{"width", r.params.geometry.width},
                 {"height", r.params.geometry.height},
                 {"C", r.params.batch},
                 {"D", r.params.depth},
                 {"k", r.params.k},
                 {"lut_period", r.params.lut_period},
                 {"energy_read", r.params.model.sram_read_cost},
                 {"energy_write", r.params.model.sram_write_cost},
                 {"energy_reg_write", r.params.model.reg_write_cost},
                 {"sparsity", r.sparsity},
                 {"clock_hz", r.clock_hz}};
  j["energy_per_event"] = cmp(r.energy);
  j["footprint_bits"] = {{"real", cmp(r.footprint.real_bits)}, {"integer", cmp(r.footprint.integer_bits)}};
  j["compute_per_event"] = {{"ours", r.compute.ours},
                            {"luvharris_tos_ops", r.compute.luvharris_tos},
                            {"ratio", r.compute.ratio},
                            {"claimed_ratio", r.compute.claimed_ratio},
                            {"note", r.compute.note}};
  j["throughput_ceps"] = {{"serial", r.ceps_serial}, {"imc", r.ceps_imc}};
  json sens = json::array();
  for (const auto& [n, ratio] : r.period_sensitivity) {
    sens.push_back({{"lut_period", n == 0 ? json("never") : json(n)}, {"energy_ratio", ratio}});
  }
  j["lut_period_sensitivity"] = sens;
  if (r.measured) {
    const auto& m = *r.measured;
    j["measured"] = {{"events", m.events},
                     {"energy_ours", m.ours},
                     {"energy_luvharris", m.luvharris},
                     {"energy_ratio", m.ratio},
                     {"ours_os_writes_per_event", m.ours_os_writes_per_event},
                     {"luvharris_writes_per_event", m.luv_writes_per_event},
                     {"relative_diff_ours", (m.ours - r.energy.ours) / r.energy.ours},
                     {"relative_diff_luvharris", (m.luvharris - r.energy.luvharris) / r.energy.luvharris}};
  }
  return j;
}

inline std::string format_table(const CostReport& r) {
  std::string s;
  char line[256];
  auto row = [&](const char* name, double ours, double luv, double ratio) {
    std::snprintf(line, sizeof line, "%-34s %14.1f %14.1f %10.2fx\n", name, ours, luv, ratio);
    s += line;
  };
  std::snprintf(line, sizeof line, "sensor %dx%d  C=%zu D=%zu k=%d  lut_period=%llu  energy R/W/reg=%.2g/%.2g/%.2g\n",
                r.params.geometry.width, r.params.geometry.height, r.params.batch, r.params.depth, r.params.k,
                static_cast<unsigned long long>(r.params.lut_period), r.params.model.sram_read_cost,
                r.params.model.sram_write_cost, r.params.model.reg_write_cost);
  s += line;
  std::snprintf(line, sizeof line, "%-34s %14s %14s %11s\n", "", "ours", "luvharris", "ratio");
  s += line;
  row("memory-access energy / event", r.energy.ours, r.energy.luvharris, r.energy.ratio);
  row("footprint bits (real log2)", r.footprint.real_bits.ours, r.footprint.real_bits.luvharris,
      r.footprint.real_bits.ratio);
  row("footprint bits (integer log2)", r.footprint.integer_bits.ours, r.footprint.integer_bits.luvharris,
      r.footprint.integer_bits.ratio);
  std::snprintf(line, sizeof line, "%-34s %14.1f %14.1f %10.2fx  (S=%.2f; claimed %.1fx, %s)\n",
                "compute ops / event", r.compute.ours, r.compute.luvharris_tos, r.compute.ratio, r.sparsity,
                r.compute.claimed_ratio, r.compute.note.c_str());
  s += line;
  std::snprintf(line, sizeof line, "throughput @ %.0f MHz: serial %.0f CEPS, IMC %.0f CEPS\n", r.clock_hz / 1e6,
                r.ceps_serial, r.ceps_imc);
  s += line;
  s += "energy ratio vs LUT rebuild period:";
  for (const auto& [n, ratio] : r.period_sensitivity) {
    std::snprintf(line, sizeof line, " %s=%.2f", n == 0 ? "never" : std::to_string(n).c_str(), ratio);
    s += line;
  }
  s += '\n';
  if (r.measured) {
    const auto& m = *r.measured;
    std::snprintf(line, sizeof line,
                  "measured over %llu events: ours %.2f, luvharris %.2f, ratio %.2fx "
                  "(OS writes/event %.3f, luvharris writes/event %.3f)\n",
                  static_cast<unsigned long long>(m.events), m.ours, m.luvharris, m.ratio,
                  m.ours_os_writes_per_event, m.luv_writes_per_event);
    s += line;
  }
  return s;
}

}  // namespace evcorner
