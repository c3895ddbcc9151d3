#pragma once

// Fixed-size patches, sort normalization and the per-patch Harris response.

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evcorner/counters.hpp"

namespace evcorner {

/// Largest patch half-size: (2k+1)^2 must not exceed the 255 ranks available
/// to sort normalization.
inline constexpr int kMaxPatchHalfSize = 7;
inline constexpr int kMaxPatchSide = 2 * kMaxPatchHalfSize + 1;

class Patch {
 public:
  explicit Patch(int k = 3) : k_(k) {
    if (k < 1 || k > kMaxPatchHalfSize) {
      throw std::invalid_argument("patch half-size must be in [1, " + std::to_string(kMaxPatchHalfSize) + "]");
    }
    values_.fill(0);
  }

  [[nodiscard]] int k() const noexcept { return k_; }
  [[nodiscard]] int side() const noexcept { return 2 * k_ + 1; }
  [[nodiscard]] int cells() const noexcept { return side() * side(); }

  // (px, py): column, row within the patch.
  [[nodiscard]] std::int32_t at(int px, int py) const noexcept { return values_[idx(px, py)]; }
  std::int32_t& at(int px, int py) noexcept { return values_[idx(px, py)]; }

  [[nodiscard]] std::int32_t operator[](int i) const noexcept { return values_[static_cast<std::size_t>(i)]; }
  std::int32_t& operator[](int i) noexcept { return values_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] int nonzero_count() const noexcept {
    int n = 0;
    for (int i = 0; i < cells(); ++i) n += values_[static_cast<std::size_t>(i)] != 0;
    return n;
  }

  friend bool operator==(const Patch& a, const Patch& b) noexcept {
    if (a.k_ != b.k_) return false;
    return std::equal(a.values_.begin(), a.values_.begin() + a.cells(), b.values_.begin());
  }

 private:
  [[nodiscard]] std::size_t idx(int px, int py) const noexcept {
    return static_cast<std::size_t>(py * side() + px);
  }

  int k_;
  std::array<std::int32_t, kMaxPatchSide * kMaxPatchSide> values_{};
};

/// Replaces the non-zero entries by 255 - rank, where rank is the position
/// in a descending sort. Zeros are left alone. Comparator calls are tallied
/// in `counters.sort_ops`.
inline void sort_normalize(Patch& patch, CostCounters& counters) {
  std::array<std::pair<std::int32_t, int>, kMaxPatchSide * kMaxPatchSide> queue;
  std::size_t n = 0;
  for (int i = 0; i < patch.cells(); ++i) {
    if (patch[i] != 0) queue[n++] = {patch[i], i};
  }
  std::uint64_t comparisons = 0;
  std::sort(queue.begin(), queue.begin() + static_cast<std::ptrdiff_t>(n), [&comparisons](const auto& a, const auto& b) {
    ++comparisons;
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  counters.sort_ops += comparisons;
  std::int32_t rank_value = 255;
  for (std::size_t i = 0; i < n; ++i) patch[queue[i].second] = rank_value--;
}

inline void sort_normalize(Patch& patch) {
  CostCounters scratch;
  sort_normalize(patch, scratch);
}

/// Binomial weights of length 2k-1, outer-multiplied; for k=3 this is the
/// [1 4 6 4 1] kernel, whose variance is exactly 1.
inline std::vector<std::int64_t> binomial_gaussian(int k) {
  const int side = 2 * k - 1;
  std::vector<std::int64_t> row(static_cast<std::size_t>(side), 0);
  row[0] = 1;
  for (int n = 1; n < side; ++n) {
    for (int i = n; i > 0; --i) row[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i - 1)];
  }
  std::vector<std::int64_t> kernel;
  kernel.reserve(static_cast<std::size_t>(side * side));
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) kernel.push_back(row[static_cast<std::size_t>(r)] * row[static_cast<std::size_t>(c)]);
  }
  return kernel;
}

struct HarrisParams {
  int k_patch = 3;
  std::array<std::int32_t, 9> sobel_x{-1, 0, 1, -2, 0, 2, -1, 0, 1};
  std::array<std::int32_t, 9> sobel_y{-1, -2, -1, 0, 0, 0, 1, 2, 1};
  /// Row-major (2k-1)x(2k-1) smoothing weights over the gradient grid.
  std::vector<std::int64_t> gaussian = binomial_gaussian(3);
  double k_harris = 0.04;
  double threshold = 0.0;

  [[nodiscard]] int grid_side() const noexcept { return 2 * k_patch - 1; }

  static HarrisParams with_half_size(int k) {
    HarrisParams p;
    p.k_patch = k;
    p.gaussian = binomial_gaussian(k);
    return p;
  }

  void validate() const {
    if (k_patch < 1 || k_patch > kMaxPatchHalfSize) {
      throw std::invalid_argument("patch half-size k must be in [1, " + std::to_string(kMaxPatchHalfSize) + "]");
    }
    const auto g = static_cast<std::size_t>(grid_side());
    if (gaussian.size() != g * g) {
      throw std::invalid_argument("gaussian kernel must be " + std::to_string(g) + "x" + std::to_string(g) +
                                  " for k=" + std::to_string(k_patch));
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (sobel_y[static_cast<std::size_t>(r * 3 + c)] != sobel_x[static_cast<std::size_t>(c * 3 + r)]) {
          throw std::invalid_argument("sobel_y must be the transpose of sobel_x");
        }
      }
    }
    for (std::size_t r = 0; r < g; ++r) {
      for (std::size_t c = 0; c < g; ++c) {
        const auto w = gaussian[r * g + c];
        if (w < 0) throw std::invalid_argument("gaussian weights must be non-negative");
        // 90 degree rotation: (r, c) -> (c, g-1-r)
        if (w != gaussian[c * g + (g - 1 - r)]) {
          throw std::invalid_argument("gaussian kernel must be symmetric under 90 degree rotation");
        }
      }
    }
    if (!(k_harris > 0.0 && k_harris < 0.25)) throw std::invalid_argument("k_harris must be in (0, 0.25)");
  }
};

/// Gaussian-weighted second-moment sums of the patch gradients.
struct HarrisMoments {
  std::int64_t sxx = 0;
  std::int64_t syy = 0;
  std::int64_t sxy = 0;

  friend bool operator==(const HarrisMoments&, const HarrisMoments&) = default;
};

/// MACs spent by one evaluation: two 3x3 Sobel passes over the gradient
/// grid, three products per grid cell and three weighted sums.
inline constexpr std::uint64_t harris_mac_count(int k) {
  const auto g = static_cast<std::uint64_t>(2 * k - 1);
  return 2 * g * g * 9 + 3 * g * g + 3 * g * g;
}

inline HarrisMoments harris_moments(const Patch& patch, const HarrisParams& params, CostCounters& counters) {
  if (patch.k() != params.k_patch) {
    throw std::invalid_argument("patch half-size " + std::to_string(patch.k()) + " does not match k=" +
                                std::to_string(params.k_patch));
  }
  const int g = params.grid_side();
  std::array<std::int64_t, (kMaxPatchSide - 2) * (kMaxPatchSide - 2)> ix{};
  std::array<std::int64_t, (kMaxPatchSide - 2) * (kMaxPatchSide - 2)> iy{};
  std::uint64_t macs = 0;

  // Valid (unpadded) 3x3 correlation: output (gx, gy) is centred on patch
  // cell (gx+1, gy+1).
  for (int gy = 0; gy < g; ++gy) {
    for (int gx = 0; gx < g; ++gx) {
      std::int64_t sx = 0;
      std::int64_t sy = 0;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          const std::int64_t v = patch.at(gx + c, gy + r);
          sx += v * params.sobel_x[static_cast<std::size_t>(r * 3 + c)];
          sy += v * params.sobel_y[static_cast<std::size_t>(r * 3 + c)];
          macs += 2;
        }
      }
      ix[static_cast<std::size_t>(gy * g + gx)] = sx;
      iy[static_cast<std::size_t>(gy * g + gx)] = sy;
    }
  }

  HarrisMoments m;
  for (int i = 0; i < g * g; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const std::int64_t xx = ix[u] * ix[u];
    const std::int64_t yy = iy[u] * iy[u];
    const std::int64_t xy = ix[u] * iy[u];
    macs += 3;
    const std::int64_t w = params.gaussian[u];
    m.sxx += w * xx;
    m.syy += w * yy;
    m.sxy += w * xy;
    macs += 3;
  }
  counters.macs += macs;
  return m;
}

/// det(M) - k * trace(M)^2. The determinant is formed exactly in 128-bit
/// integers before the conversion to double.
inline double harris_response(const HarrisMoments& m, double k_harris) noexcept {
  const __int128 det = static_cast<__int128>(m.sxx) * m.syy - static_cast<__int128>(m.sxy) * m.sxy;
  const double trace = static_cast<double>(m.sxx) + static_cast<double>(m.syy);
  return static_cast<double>(det) - k_harris * trace * trace;
}

inline double harris_score(const Patch& patch, const HarrisParams& params, CostCounters& counters) {
  return harris_response(harris_moments(patch, params, counters), params.k_harris);
}

inline double harris_score(const Patch& patch, const HarrisParams& params) {
  CostCounters scratch;
  return harris_score(patch, params, scratch);
}

}  // namespace evcorner
