#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "evcorner/ordered_surface.hpp"

using namespace evcorner;

namespace {

const SensorGeometry kGeo{40, 30};

Event at(int x, int y, Polarity p = Polarity::On) {
  return Event{0, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), p};
}

std::size_t count_nonzero(const OrderedSurface& os) {
  std::size_t n = 0;
  for (int y = 0; y < kGeo.height; ++y) {
    for (int x = 0; x < kGeo.width; ++x) n += os.value(x, y) != 0;
  }
  return n;
}

}  // namespace

TEST(OrderedSurface, ForcedBuildOnEmptyArrayIsAllZero) {
  TemporalArray2D a(10, 100);
  OrderedSurface os(kGeo);
  EXPECT_EQ(build_ordered_surface(a, 0, os), 0U);
  EXPECT_EQ(count_nonzero(os), 0U);
}

TEST(OrderedSurface, HandTracedTwoByTwo) {
  TemporalArray2D a(2, 2);
  OrderedSurface os(kGeo);
  std::optional<std::size_t> ready;
  for (const auto& e : {at(1, 1), at(2, 2), at(3, 3), at(4, 4)}) ready = a.insert(e);
  ASSERT_EQ(ready, std::optional<std::size_t>{1});
  build_ordered_surface(a, *ready, os);
  EXPECT_EQ(os.value(1, 1), 1U);
  EXPECT_EQ(os.value(2, 2), 2U);
  EXPECT_EQ(os.value(3, 3), 3U);
  EXPECT_EQ(os.value(4, 4), 4U);
  EXPECT_EQ(count_nonzero(os), 4U);
}

TEST(OrderedSurface, SkipsNextInsertionRow) {
  // D=2: rows 0,1,2. After row 2 fills, row 0 (oldest) must be skipped.
  TemporalArray2D a(2, 2);
  OrderedSurface os(kGeo);
  std::optional<std::size_t> ready;
  for (int i = 0; i < 6; ++i) ready = a.insert(at(i, 0));
  ASSERT_EQ(ready, std::optional<std::size_t>{2});
  build_ordered_surface(a, *ready, os);
  EXPECT_EQ(os.value(0, 0), 0U);
  EXPECT_EQ(os.value(1, 0), 0U);
  EXPECT_EQ(os.value(2, 0), 1U);
  EXPECT_EQ(os.value(5, 0), 4U);
}

TEST(OrderedSurface, LaterDuplicateWins) {
  TemporalArray2D a(2, 2);
  OrderedSurface os(kGeo);
  a.insert(at(5, 5));
  a.insert(at(6, 6));
  a.insert(at(5, 5));
  const auto ready = a.insert(at(7, 7));
  build_ordered_surface(a, *ready, os);
  EXPECT_EQ(os.value(5, 5), 3U);
  EXPECT_EQ(count_nonzero(os), 3U);
}

TEST(OrderedSurface, OutOfSensorReadsZero) {
  OrderedSurface os(kGeo);
  EXPECT_EQ(os.value(-1, 0), 0U);
  EXPECT_EQ(os.value(0, -1), 0U);
  EXPECT_EQ(os.value(kGeo.width, 0), 0U);
}

TEST(OrderedSurface, EpochWraparoundClearsStalePixels) {
  BasicOrderedSurface<std::uint8_t> os(kGeo);
  TemporalArray2D a(1, 1);
  // Pixel (1,1) written in epoch 1 only; it must never reappear.
  build_ordered_surface(a, *a.insert(at(1, 1)), os);
  EXPECT_EQ(os.value(1, 1), 1U);
  for (int i = 0; i < 600; ++i) {
    build_ordered_surface(a, *a.insert(at(2, 2)), os);
    ASSERT_EQ(os.value(1, 1), 0U) << "build " << i;
    ASSERT_EQ(os.value(2, 2), 1U);
  }
  EXPECT_GE(os.full_clears(), 2U);
}

TEST(OrderedSurface, BuildChargesOneWritePerHistoryEvent) {
  TemporalArray2D a(3, 4);
  OrderedSurface os(kGeo);
  CostCounters c;
  std::size_t builds = 0;
  for (int i = 0; i < 40; ++i) {
    if (auto r = a.insert(at(i % kGeo.width, i % 7))) {
      const std::uint64_t before = c.sram_writes;
      const auto last = build_ordered_surface(a, *r, os, c);
      ++builds;
      EXPECT_EQ(c.sram_writes - before, last);
      EXPECT_EQ(last, std::min<std::size_t>(builds, 3) * 4);
    }
  }
}

// Effective values are distinct, lie in [1, D*C] and equal the last write
// position of each pixel among the D history rows.
TEST(OrderedSurface, DistinctnessRangeAndLastWriterProperty) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t depth = 1 + rng() % 5;
    const std::size_t batch = 1 + rng() % 12;
    TemporalArray2D a(depth, batch);
    OrderedSurface os(kGeo);
    std::vector<Event> inserted;
    for (int i = 0; i < 200; ++i) {
      const Event e = at(static_cast<int>(rng() % 8), static_cast<int>(rng() % 8));
      inserted.push_back(e);
      const auto r = a.insert(e);
      if (!r) continue;
      const auto last = build_ordered_surface(a, *r, os);
      ASSERT_LE(last, depth * batch);

      // Oracle: the history is the last min(D*C, n) inserted events.
      const std::size_t n = std::min(inserted.size(), depth * batch);
      std::map<std::pair<int, int>, std::uint32_t> expected;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& h = inserted[inserted.size() - n + j];
        expected[{h.x, h.y}] = static_cast<std::uint32_t>(j + 1);
      }
      std::set<std::uint32_t> seen;
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
          const auto v = os.value(x, y);
          const auto it = expected.find({x, y});
          ASSERT_EQ(v, it == expected.end() ? 0U : it->second);
          if (v != 0) {
            ASSERT_GE(v, 1U);
            ASSERT_LE(v, depth * batch);
            ASSERT_TRUE(seen.insert(v).second) << "duplicate order value " << v;
          }
        }
      }
      ASSERT_LE(seen.size(), depth * batch);
    }
  }
}

TEST(ExtractPatch, CornerPixelIsZeroPadded) {
  TemporalArray2D a(1, 4);
  OrderedSurface os(kGeo);
  a.insert(at(0, 0));
  a.insert(at(1, 0));
  a.insert(at(0, 1));
  build_ordered_surface(a, *a.insert(at(3, 3)), os);
  const Patch p = extract_patch(os, 0, 0, 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 7; ++c) {
      EXPECT_EQ(p.at(c, r), 0) << c << "," << r;
      EXPECT_EQ(p.at(r, c), 0) << r << "," << c;
    }
  }
  EXPECT_EQ(p.at(3, 3), 1);
  EXPECT_EQ(p.at(4, 3), 2);
  EXPECT_EQ(p.at(3, 4), 3);
  EXPECT_EQ(p.at(6, 6), 4);
}

TEST(ExtractPatch, SingleCentredValue) {
  TemporalArray2D a(1, 1);
  OrderedSurface os(kGeo);
  build_ordered_surface(a, *a.insert(at(10, 10)), os);
  const Patch p = extract_patch(os, 10, 10, 3);
  EXPECT_EQ(p.nonzero_count(), 1);
  EXPECT_EQ(p.at(3, 3), 1);
}

TEST(ExtractPatch, MatchesPerPixelLookup) {
  std::mt19937 rng(2024);
  TemporalArray2D a(4, 50);
  OrderedSurface os(kGeo);
  std::optional<std::size_t> ready;
  for (int i = 0; i < 200; ++i) {
    ready = a.insert(at(static_cast<int>(rng() % kGeo.width), static_cast<int>(rng() % kGeo.height)));
  }
  ASSERT_TRUE(ready);
  build_ordered_surface(a, *ready, os);
  CostCounters c;
  for (int i = 0; i < 1000; ++i) {
    const int x = static_cast<int>(rng() % kGeo.width);
    const int y = static_cast<int>(rng() % kGeo.height);
    const int k = 1 + static_cast<int>(rng() % 7);
    const Patch p = extract_patch(os, x, y, k, c);
    for (int py = 0; py < 2 * k + 1; ++py) {
      for (int px = 0; px < 2 * k + 1; ++px) {
        const int sx = x + px - k;
        const int sy = y + py - k;
        const bool inside = sx >= 0 && sy >= 0 && sx < kGeo.width && sy < kGeo.height;
        ASSERT_EQ(p.at(px, py), inside ? static_cast<std::int32_t>(os.value(sx, sy)) : 0);
      }
    }
  }
}
