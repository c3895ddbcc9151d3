#include <gtest/gtest.h>

#include <random>

#include "evcorner/baselines.hpp"
#include "evcorner/cost_model.hpp"
#include "evcorner/detector.hpp"
#include "evcorner/eval.hpp"

using namespace evcorner;

TEST(SortOpCount, HalfSparsePatch) { EXPECT_NEAR(sort_op_count(0.5, 49), 113.0603, 1e-4); }

TEST(SortOpCount, SparserPatch) { EXPECT_NEAR(sort_op_count(0.62, 49), 78.5537, 1e-4); }

TEST(SortOpCount, NoNonZerosNoOps) {
  EXPECT_EQ(sort_op_count(0.99, 49), 0.0);
  EXPECT_EQ(sort_op_count(0.0, 1), 0.0);
}

TEST(SortOpCount, RejectsOutOfDomain) {
  EXPECT_THROW(sort_op_count(1.0, 49), std::invalid_argument);
  EXPECT_THROW(sort_op_count(-0.1, 49), std::invalid_argument);
  EXPECT_THROW(sort_op_count(0.5, 0.5), std::invalid_argument);
}

TEST(AnalyticEnergy, DefaultConfiguration) {
  const auto e = analytic_energy_per_event(EnergyParams{});
  EXPECT_NEAR(e.ours, 79.3, 1e-9);
  EXPECT_NEAR(e.luvharris, 2895.8, 1e-9);
  EXPECT_NEAR(e.ratio, 36.5, 0.05);
}

TEST(AnalyticEnergy, NeverRebuiltLut) {
  EnergyParams p;
  p.lut_period = 0;
  const auto e = analytic_energy_per_event(p);
  EXPECT_NEAR(e.luvharris, 197.0, 1e-12);
  EXPECT_NEAR(e.ratio, 2.48, 0.005);
}

TEST(AnalyticEnergy, ZeroDepthLeavesRegisterAndReads) {
  EnergyParams p;
  p.depth = 0;
  EXPECT_NEAR(analytic_energy_per_event(p).ours, 49.3, 1e-12);
}

TEST(AnalyticEnergy, RatioInvariantUnderUniformScaling) {
  EnergyParams p;
  const double base = analytic_energy_per_event(p).ratio;
  for (double s : {0.001, 0.5, 7.0, 1e6}) {
    p.model = EnergyModel{s * 1.0, s * 3.0, s * 0.3};
    EXPECT_NEAR(analytic_energy_per_event(p).ratio, base, 1e-12 * base);
  }
}

TEST(AnalyticEnergy, RatioFallsWithLongerRebuildPeriod) {
  EnergyParams p;
  double prev = 1e300;
  for (std::uint64_t n : {1, 10, 100, 1000, 100000}) {
    p.lut_period = n;
    const double r = analytic_energy_per_event(p).ratio;
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(Footprint, DefaultConfiguration) {
  const auto f = analytic_footprint_bits(SensorGeometry{346, 260}, 100, 10);
  EXPECT_EQ(f.real_bits.luvharris, 3598400.0);
  EXPECT_GE(f.real_bits.ratio, 3.6);
  EXPECT_LE(f.real_bits.ratio, 4.0);
  EXPECT_NEAR(f.real_bits.ratio, 3.88, 0.01);
  EXPECT_GE(f.integer_bits.ratio, 3.4);
  // 1100 slots * (9 + 9) + 89960 * 11 bits.
  EXPECT_EQ(f.integer_bits.ours, 1100.0 * 18.0 + 89960.0 * 11.0);
}

TEST(Footprint, DegenerateSensorStaysFinite) {
  const auto f = analytic_footprint_bits(SensorGeometry{1, 1}, 1, 1);
  EXPECT_TRUE(std::isfinite(f.real_bits.ratio));
  EXPECT_EQ(f.real_bits.luvharris, 40.0);
  EXPECT_EQ(f.real_bits.ours, 1.0);
  EXPECT_EQ(f.real_bits.ratio, 40.0);
}

TEST(Compute, HalfSparseDefaultPatch) {
  const auto c = analytic_compute_per_event(0.5, 3);
  EXPECT_NEAR(c.ours, 713.1, 0.05);
  EXPECT_EQ(c.luvharris_tos, 50.0);
  EXPECT_EQ(c.claimed_ratio, 2.3);
  EXPECT_EQ(c.note, "accounting basis unstated for the claimed ratio");
  EXPECT_EQ(kHarrisMacs, 600U);
}

TEST(Throughput, SerialAndInMemory) {
  EXPECT_NEAR(throughput_estimate(100e6, ThroughputMode::Serial), 166666.67, 0.01);
  EXPECT_NEAR(throughput_estimate(100e6, ThroughputMode::Imc), 3703703.7, 0.1);
  EXPECT_NEAR(throughput_estimate(200e6, ThroughputMode::Serial), 333333.33, 0.01);
  EXPECT_THROW(throughput_estimate(0.0, ThroughputMode::Serial), std::invalid_argument);
}

TEST(Measured, RejectsMismatchedOrEmptyCounters) {
  CostCounters a, b;
  EXPECT_THROW(measured_energy(a, b, EnergyModel{}), std::invalid_argument);
  a.events_processed = 5;
  EXPECT_THROW(measured_energy(a, b, EnergyModel{}), std::invalid_argument);
}

TEST(Measured, ConvertsCountersToPerEventEnergy) {
  CostCounters ours, luv;
  ours.events_processed = luv.events_processed = 10;
  ours.sram_reads = 490;
  ours.sram_writes = 100;
  ours.reg_writes = 10;
  luv.sram_reads = 500;
  luv.sram_writes = 490;
  const auto m = measured_energy(ours, luv, EnergyModel{});
  EXPECT_NEAR(m.ours, 79.3, 1e-12);
  EXPECT_NEAR(m.luvharris, 197.0, 1e-12);
  EXPECT_NEAR(m.ours_os_writes_per_event, 10.0, 1e-12);
  EXPECT_NEAR(m.luv_writes_per_event, 49.0, 1e-12);
}

// After warm-up the instrumented proposed pipeline costs what the formula
// predicts, and luvHarris matches its formula when the run is a whole number
// of rebuild periods.
TEST(Measured, InstrumentedRunsConvergeToAnalyticFigures) {
  SyntheticScene scene = default_square_scene();
  scene.duration_us = 200000;
  const auto data = generate_synthetic(scene, 3);
  const auto signal = stcf_filter(data.events, scene.geometry, StcfConfig{});
  const std::size_t usable = signal.size() / 100 * 100;
  ASSERT_GE(usable, 60U * 100U);
  const std::span<const Event> stream(signal.data(), usable);

  CoreConfig core;
  StcfConfig off;
  off.enabled = false;
  CornerPipeline pipeline(scene.geometry, core, off);
  std::vector<CornerEvent> out;
  CostCounters warm;
  for (const auto& e : stream) {
    pipeline.push(e, out);
    if (pipeline.counters().events_processed == core.depth * core.batch) warm = pipeline.counters();
  }
  LuvHarrisDetector luv(scene.geometry, LuvHarrisConfig{});
  luv.run(stream);

  EnergyParams params;
  const auto analytic = analytic_energy_per_event(params);
  const auto steady = pipeline.counters() - warm;
  const double ours = EnergyModel{}.energy(steady) / static_cast<double>(steady.events_processed);
  EXPECT_NEAR(ours, analytic.ours, 0.05 * analytic.ours);

  const auto report = measured_report(pipeline.counters(), luv.counters(), params);
  ASSERT_TRUE(report.measured.has_value());
  EXPECT_NEAR(report.measured->luvharris, analytic.luvharris, 1e-9 * analytic.luvharris);
  EXPECT_DOUBLE_EQ(report.measured->luv_writes_per_event, 49.0 + 89960.0 / 100.0);
}

TEST(Report, JsonAndTableCarryHeadlineFigures) {
  const auto r = analytic_report(EnergyParams{});
  const auto j = to_json(r);
  EXPECT_NEAR(j["energy_per_event"]["ratio"].get<double>(), 36.52, 0.01);
  EXPECT_EQ(j["footprint_bits"]["real"]["luvharris"].get<double>(), 3598400.0);
  EXPECT_EQ(j["compute_per_event"]["note"].get<std::string>(), "accounting basis unstated for the claimed ratio");
  EXPECT_FALSE(j.contains("measured"));
  EXPECT_EQ(j["lut_period_sensitivity"].back()["lut_period"].get<std::string>(), "never");
  const auto table = format_table(r);
  EXPECT_NE(table.find("36.52x"), std::string::npos);
  EXPECT_NE(table.find("serial 166667 CEPS"), std::string::npos);
}
