#include <gtest/gtest.h>

#include <random>

#include "evcorner/baselines.hpp"
#include "evcorner/cost_model.hpp"
#include "reference_harris.hpp"

using namespace evcorner;

namespace {

const SensorGeometry kGeo{48, 36};

Event ev(Timestamp t, int x, int y, Polarity p = Polarity::On) {
  return Event{t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), p};
}

std::vector<Event> random_stream(std::size_t n, std::uint32_t seed, const SensorGeometry& geo = kGeo) {
  std::mt19937 rng(seed);
  std::vector<Event> out;
  Timestamp t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += static_cast<Timestamp>(rng() % 200);
    out.push_back(ev(t, static_cast<int>(rng() % static_cast<unsigned>(geo.width)),
                     static_cast<int>(rng() % static_cast<unsigned>(geo.height)),
                     rng() % 2 ? Polarity::On : Polarity::Off));
  }
  return out;
}

// Zero-padded (2k+1)^2 window of a TOS, as a flat image for the reference.
std::vector<std::int64_t> tos_window(const Tos& tos, int x, int y, int k) {
  std::vector<std::int64_t> img;
  for (int r = -k; r <= k; ++r) {
    for (int c = -k; c <= k; ++c) img.push_back(tos.at(x + c, y + r));
  }
  return img;
}

}  // namespace

TEST(Tos, FirstEventSetsCentreOnly) {
  Tos tos(kGeo, 3);
  CostCounters c;
  tos.update(ev(0, 10, 10), c);
  EXPECT_EQ(tos.at(10, 10), 255);
  for (int y = 7; y <= 13; ++y) {
    for (int x = 7; x <= 13; ++x) {
      if (x != 10 || y != 10) {
        EXPECT_EQ(tos.at(x, y), 0);
      }
    }
  }
}

TEST(Tos, RepeatedNeighbourDecays) {
  Tos tos(kGeo, 3);
  CostCounters c;
  tos.update(ev(0, 10, 10), c);
  tos.update(ev(1, 12, 10), c);
  EXPECT_EQ(tos.at(12, 10), 255);
  EXPECT_EQ(tos.at(10, 10), 254);
  tos.update(ev(2, 12, 10), c);
  EXPECT_EQ(tos.at(12, 10), 255);
  EXPECT_EQ(tos.at(10, 10), 253);
}

TEST(Tos, FortyNineReadsAndWritesPerEvent) {
  Tos tos(kGeo, 3);
  CostCounters c;
  tos.update(ev(0, 0, 0), c);
  EXPECT_EQ(c.sram_writes, 49U);
  EXPECT_EQ(c.sram_reads, 49U);
  tos.update(ev(0, 20, 20), c);
  EXPECT_EQ(c.sram_writes, 98U);
}

TEST(Tos, BorderEventsStayInsideStorage) {
  Tos tos(kGeo, 3);
  CostCounters c;
  for (int i = 0; i < 10; ++i) {
    tos.update(ev(i, 0, 0), c);
    tos.update(ev(i, kGeo.width - 1, kGeo.height - 1), c);
  }
  EXPECT_EQ(tos.at(0, 0), 255);
  EXPECT_EQ(tos.at(-1, 0), 0);
  EXPECT_EQ(tos.at(kGeo.width, 0), 0);
}

TEST(Tos, FloorClearsFadedValues) {
  Tos tos(kGeo, 1, 250);
  CostCounters c;
  tos.update(ev(0, 10, 10), c);
  for (int i = 0; i < 5; ++i) tos.update(ev(i, 11, 10), c);
  EXPECT_EQ(tos.at(10, 10), 250);
  tos.update(ev(9, 11, 10), c);
  EXPECT_EQ(tos.at(10, 10), 0);
}

TEST(Tos, ValuesStayBoundedAndFloored) {
  Tos plain(kGeo, 2);
  Tos floored(kGeo, 2, 200);
  CostCounters c;
  for (const auto& e : random_stream(20000, 3)) {
    plain.update(e, c);
    floored.update(e, c);
  }
  for (int y = 0; y < kGeo.height; ++y) {
    for (int x = 0; x < kGeo.width; ++x) {
      const int v = floored.at(x, y);
      EXPECT_TRUE(v == 0 || v >= 200) << v;
      EXPECT_LE(plain.at(x, y), 255);
    }
  }
  EXPECT_THROW(Tos(kGeo, 0), std::invalid_argument);
}

TEST(DenseHarris, MatchesPerPixelWindows) {
  std::mt19937 rng(4);
  for (int k = 1; k <= 4; ++k) {
    const SensorGeometry geo{17, 13};
    std::vector<std::uint8_t> img(geo.pixels());
    for (auto& v : img) v = rng() % 3 == 0 ? static_cast<std::uint8_t>(rng() % 256) : 0;
    const auto params = HarrisParams::with_half_size(k);
    const auto dense = dense_harris_moments(
        geo, [&](int x, int y) { return img[geo.index(x, y)]; }, params);
    for (int y = 0; y < geo.height; ++y) {
      for (int x = 0; x < geo.width; ++x) {
        std::vector<std::int64_t> window;
        for (int r = -k; r <= k; ++r) {
          for (int c = -k; c <= k; ++c) window.push_back(geo.contains(x + c, y + r) ? img[geo.index(x + c, y + r)] : 0);
        }
        const auto ref = reftest::reference_moments(window, 2 * k + 1);
        const auto& m = dense[geo.index(x, y)];
        ASSERT_EQ(m.sxx, ref.sxx);
        ASSERT_EQ(m.syy, ref.syy);
        ASSERT_EQ(m.sxy, ref.sxy);
      }
    }
  }
}

TEST(LuvHarris, PeriodOneTracksDenseHarris) {
  LuvHarrisConfig cfg;
  cfg.lut_period = 1;
  LuvHarrisDetector det(kGeo, cfg);
  for (const auto& e : random_stream(500, 5)) {
    const auto r = det.process(e);
    const auto ref = reftest::reference_moments(tos_window(det.tos(), e.x, e.y, 3), 7);
    const HarrisMoments m{ref.sxx, ref.syy, ref.sxy};
    ASSERT_EQ(static_cast<float>(r.score), static_cast<float>(harris_response(m, cfg.harris.k_harris)));
  }
  EXPECT_EQ(det.lut().rebuilds(), 500U);
}

TEST(LuvHarris, NeverRebuiltScoresZero) {
  LuvHarrisConfig cfg;
  cfg.lut_period = 0;
  for (const auto& r : luvharris_emulated(random_stream(300, 6), kGeo, cfg)) EXPECT_EQ(r.score, 0.0);
}

TEST(LuvHarris, RebuildsEveryNthEvent) {
  LuvHarrisConfig cfg;
  cfg.lut_period = 7;
  LuvHarrisDetector det(kGeo, cfg);
  det.run(random_stream(100, 7));
  EXPECT_EQ(det.lut().rebuilds(), 14U);
  EXPECT_EQ(det.counters().events_processed, 100U);
}

TEST(LuvHarris, MeasuredEnergyMatchesAnalyticFormula) {
  const SensorGeometry geo{346, 260};
  LuvHarrisConfig cfg;
  LuvHarrisDetector det(geo, cfg);
  det.run(random_stream(1000, 8, geo));
  const auto& c = det.counters();
  EXPECT_EQ(c.sram_writes, 1000U * 49U + 10U * geo.pixels());
  EXPECT_EQ(c.sram_reads, 1000U * (49U + 1U));

  EnergyParams p;
  p.geometry = geo;
  const double analytic = analytic_energy_per_event(p).luvharris;
  EXPECT_NEAR(EnergyModel{}.energy(c) / 1000.0, analytic, 1e-9);
}

TEST(LuvHarris, Deterministic) {
  const auto events = random_stream(2000, 9);
  LuvHarrisConfig cfg;
  cfg.lut_period = 13;
  EXPECT_EQ(luvharris_emulated(events, kGeo, cfg), luvharris_emulated(events, kGeo, cfg));
}

TEST(EHarris, FirstEventIsIsolatedPoint) {
  Sae sae(kGeo);
  CostCounters c;
  const Event e = ev(1000, 20, 20);
  sae.update(e, c);
  const Patch p = binarized_sae_patch(sae, e, 3, 50000, c);
  EXPECT_EQ(p.nonzero_count(), 1);
  EXPECT_EQ(p.at(3, 3), 255);
  const auto r = eharris_detect(sae, e, HarrisParams{}, 50000, c);
  EXPECT_DOUBLE_EQ(r.score, 232766211686400.0);
}

TEST(EHarris, QuadrantActivityIsPositive) {
  Sae sae(kGeo);
  CostCounters c;
  for (int y = 17; y <= 20; ++y) {
    for (int x = 17; x <= 20; ++x) sae.update(ev(100, x, y), c);
  }
  const Event e = ev(200, 20, 20);
  sae.update(e, c);
  EXPECT_GT(eharris_detect(sae, e, HarrisParams{}, 50000, c).score, 0.0);
}

TEST(EHarris, WindowExcludesStaleActivity) {
  Sae sae(kGeo);
  CostCounters c;
  sae.update(ev(0, 19, 20), c);
  sae.update(ev(40000, 21, 20), c);
  const Event e = ev(60000, 20, 20);
  sae.update(e, c);
  const Patch p = binarized_sae_patch(sae, e, 3, 50000, c);
  EXPECT_EQ(p.at(2, 3), 0);
  EXPECT_EQ(p.at(4, 3), 255);
  EXPECT_EQ(p.nonzero_count(), 2);
}

TEST(EHarris, CountsSixHundredMacsPerEvent) {
  EHarrisDetector det(kGeo, EHarrisConfig{});
  det.run(random_stream(50, 10));
  EXPECT_EQ(det.counters().macs, 50U * 600U);
  EXPECT_EQ(det.counters().sram_writes, 50U);
  EXPECT_EQ(det.counters().sram_reads, 50U * 49U);
}

TEST(EHarris, PatchDependsOnlyOnSurfaceTimeAndWindow) {
  const auto events = random_stream(3000, 11);
  Sae live(kGeo);
  CostCounters c;
  for (std::size_t i = 0; i < events.size(); ++i) {
    live.update(events[i], c);
    if (i % 500 != 499) continue;
    Sae rebuilt(kGeo);
    for (std::size_t j = 0; j <= i; ++j) rebuilt.update(events[j], c);
    EXPECT_EQ(binarized_sae_patch(live, events[i], 3, 20000, c), binarized_sae_patch(rebuilt, events[i], 3, 20000, c));
  }
}

TEST(EHarris, PerPolarityIgnoresOtherPolarity) {
  Sae sae(kGeo, true);
  CostCounters c;
  sae.update(ev(0, 19, 20, Polarity::Off), c);
  const Event e = ev(10, 20, 20, Polarity::On);
  sae.update(e, c);
  EXPECT_EQ(binarized_sae_patch(sae, e, 3, 50000, c).nonzero_count(), 1);
}

TEST(Sae, TimestampsNeverDecrease) {
  Sae sae(kGeo);
  CostCounters c;
  sae.update(ev(500, 3, 3), c);
  sae.update(ev(400, 3, 3), c);
  EXPECT_EQ(sae.at(3, 3), 500);
  EXPECT_EQ(sae.at(-1, 3), Sae::kNever);
}
