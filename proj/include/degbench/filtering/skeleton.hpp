#pragma once

// Alignment gate: integer displacement between the edge skeletons of two
// images, found by exhaustive cross-correlation over a square window.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/filtering/verdict.hpp"

namespace degbench {

struct SkeletonParams {
  double presmooth_sigma = 1.0;
  double edge_percentile = 0.9;
  double min_density = 0.001;
  double target_sigma = 1.0;  // softening of the second skeleton before correlation
};

/// Binary mask, 1 = skeleton pixel.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryMask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}
  std::uint8_t& at(int x, int y) noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  /// Out-of-range pixels read as 0.
  std::uint8_t get(int x, int y) const noexcept {
    return x < 0 || y < 0 || x >= width || y >= height ? 0 : at(x, y);
  }
  std::size_t count() const noexcept { return static_cast<std::size_t>(std::count(data.begin(), data.end(), 1)); }
  double density() const noexcept { return data.empty() ? 0.0 : static_cast<double>(count()) / data.size(); }
};

/// Sobel gradient magnitude with clamped borders.
inline Plane sobel_magnitude(const Plane& p) {
  Plane out(p.width, p.height);
  auto v = [&](int x, int y) { return static_cast<double>(p.at(clamp_index(x, p.width), clamp_index(y, p.height))); };
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      const double gx = (v(x + 1, y - 1) + 2 * v(x + 1, y) + v(x + 1, y + 1)) -
                        (v(x - 1, y - 1) + 2 * v(x - 1, y) + v(x - 1, y + 1));
      const double gy = (v(x - 1, y + 1) + 2 * v(x, y + 1) + v(x + 1, y + 1)) -
                        (v(x - 1, y - 1) + 2 * v(x, y - 1) + v(x + 1, y - 1));
      out.at(x, y) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
    }
  return out;
}

/// One Zhang-Suen thinning iteration (both sub-passes).
inline BinaryMask thin_once(BinaryMask m) {
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::size_t> remove;
    for (int y = 0; y < m.height; ++y)
      for (int x = 0; x < m.width; ++x) {
        if (!m.at(x, y)) continue;
        // P2..P9 clockwise from north.
        const std::array<int, 8> n = {m.get(x, y - 1),     m.get(x + 1, y - 1), m.get(x + 1, y), m.get(x + 1, y + 1),
                                      m.get(x, y + 1),     m.get(x - 1, y + 1), m.get(x - 1, y), m.get(x - 1, y - 1)};
        int b = 0, a = 0;
        for (int i = 0; i < 8; ++i) {
          b += n[static_cast<std::size_t>(i)];
          a += !n[static_cast<std::size_t>(i)] && n[static_cast<std::size_t>((i + 1) % 8)];
        }
        const int p2 = n[0], p4 = n[2], p6 = n[4], p8 = n[6];
        const bool c = pass == 0 ? (p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0) : (p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0);
        if (b >= 2 && b <= 6 && a == 1 && c) remove.push_back(static_cast<std::size_t>(y) * m.width + x);
      }
    for (std::size_t i : remove) m.data[i] = 0;
  }
  return m;
}

/// Pixels whose smoothed gradient magnitude exceeds the given percentile,
/// thinned once.
inline BinaryMask edge_skeleton(const ImageBuffer& img, const SkeletonParams& p = {}) {
  require(p.edge_percentile >= 0.0 && p.edge_percentile < 1.0, ErrorKind::parameter,
          "edge percentile must lie in [0,1)");
  const Plane mag = sobel_magnitude(gaussian_blur(gray_plane(img), p.presmooth_sigma));
  std::vector<float> sorted = mag.data;
  const auto k = static_cast<std::size_t>(std::floor(p.edge_percentile * static_cast<double>(sorted.size() - 1)));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  const float threshold = sorted[k];
  BinaryMask m(mag.width, mag.height);
  for (std::size_t i = 0; i < mag.size(); ++i) m.data[i] = mag.data[i] > threshold ? 1 : 0;
  return thin_once(std::move(m));
}

struct ShiftEstimate {
  int dx = 0;
  int dy = 0;
  double peak = 0.0;  // mean softened-target value over the overlapping source skeleton
};

/// Displacement d maximizing the correlation of a's skeleton at p with b's
/// softened skeleton at p + d, so b(x + dx, y + dy) ~ a(x, y). Exact ties go to
/// the smaller shift (Chebyshev, then Manhattan length).
inline ShiftEstimate estimate_skeleton_shift(const BinaryMask& a, const BinaryMask& b, int radius,
                                             double target_sigma = 1.0) {
  require(a.width == b.width && a.height == b.height, ErrorKind::shape, "skeletons differ in size");
  require(radius >= 0, ErrorKind::parameter, "search radius must be non-negative");
  Plane target(b.width, b.height);
  for (std::size_t i = 0; i < b.data.size(); ++i) target.data[i] = b.data[i];
  target = gaussian_blur(target, target_sigma);
  std::vector<std::pair<int, int>> pts;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x)
      if (a.at(x, y)) pts.emplace_back(x, y);
  std::vector<std::pair<int, int>> shifts;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) shifts.emplace_back(dx, dy);
  std::stable_sort(shifts.begin(), shifts.end(), [](auto s, auto t) {
    const int cs = std::max(std::abs(s.first), std::abs(s.second)), ct = std::max(std::abs(t.first), std::abs(t.second));
    if (cs != ct) return cs < ct;
    return std::abs(s.first) + std::abs(s.second) < std::abs(t.first) + std::abs(t.second);
  });
  ShiftEstimate best{0, 0, -1.0};
  for (const auto& [dx, dy] : shifts) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [x, y] : pts) {
      const int u = x + dx, v = y + dy;
      if (u < 0 || v < 0 || u >= a.width || v >= a.height) continue;
      sum += target.at(u, v);
      ++n;
    }
    const double score = n ? sum / static_cast<double>(n) : 0.0;
    if (score > best.peak) best = {dx, dy, score};
  }
  return best;
}

/// Pass iff the estimated shift has Chebyshev length <= max_shift. Near-empty
/// skeletons give an indeterminate verdict (external_reject).
inline FilterVerdict skeleton_shift_filter(const ImageBuffer& a, const ImageBuffer& b, int search_radius,
                                           int max_shift, const SkeletonParams& p = {}) {
  require(a.width() == b.width() && a.height() == b.height(), ErrorKind::shape, "pair images differ in size");
  require(max_shift >= 0 && search_radius >= max_shift, ErrorKind::parameter,
          "need 0 <= max_shift <= search_radius");
  const BinaryMask sa = edge_skeleton(a, p), sb = edge_skeleton(b, p);
  std::map<std::string, double> m = {{"skeleton_density_a", sa.density()}, {"skeleton_density_b", sb.density()}};
  if (sa.density() < p.min_density || sb.density() < p.min_density)
    return FilterVerdict::reject(FilterReason::external_reject, std::move(m));
  const ShiftEstimate e = estimate_skeleton_shift(sa, sb, search_radius, p.target_sigma);
  m["dx"] = e.dx;
  m["dy"] = e.dy;
  m["peak"] = e.peak;
  return FilterVerdict::decide(std::max(std::abs(e.dx), std::abs(e.dy)) <= max_shift, FilterReason::misaligned,
                               std::move(m));
}

}  // namespace degbench
