#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/seed.hpp"

namespace degbench {

namespace detail {

inline double smoothstep(double t) noexcept { return t * t * (3.0 - 2.0 * t); }

}  // namespace detail

/// One octave of lattice value noise: `cells` x `cells` cells with uniform
/// lattice values, smoothstep-interpolated. Output is unnormalized in [0,1].
inline Plane lattice_noise(int width, int height, int cells, Rng& rng) {
  require(cells >= 1, ErrorKind::parameter, "lattice cell count must be >= 1");
  const int n = cells + 1;
  std::vector<double> lattice(static_cast<std::size_t>(n) * n);
  for (double& v : lattice) v = rng.uniform();
  Plane out(width, height);
  const double sx = static_cast<double>(cells) / width;
  const double sy = static_cast<double>(cells) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = (y + 0.5) * sy;
    const int iy = std::min(static_cast<int>(fy), cells - 1);
    const double ty = detail::smoothstep(fy - iy);
    for (int x = 0; x < width; ++x) {
      const double fx = (x + 0.5) * sx;
      const int ix = std::min(static_cast<int>(fx), cells - 1);
      const double tx = detail::smoothstep(fx - ix);
      const auto L = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * n + i]; };
      const double top = L(ix, iy) + (L(ix + 1, iy) - L(ix, iy)) * tx;
      const double bot = L(ix, iy + 1) + (L(ix + 1, iy + 1) - L(ix, iy + 1)) * tx;
      out.at(x, y) = static_cast<float>(top + (bot - top) * ty);
    }
  }
  return out;
}

/// Octave sum with 4 cells at the first octave, doubling per octave and
/// halving amplitude; min-max normalized to [0,1].
inline Plane fractal_noise(int width, int height, int octaves, Rng& rng) {
  require(octaves >= 1, ErrorKind::parameter, "octaves must be >= 1");
  Plane acc(width, height);
  double amp = 1.0;
  int cells = 4;
  for (int o = 0; o < octaves; ++o) {
    const Plane layer = lattice_noise(width, height, cells, rng);
    for (std::size_t i = 0; i < acc.size(); ++i) acc.data[i] += static_cast<float>(amp * layer.data[i]);
    amp *= 0.5;
    cells *= 2;
  }
  const auto [lo, hi] = std::minmax_element(acc.data.begin(), acc.data.end());
  const float mn = *lo;
  const float range = *hi - *lo;
  for (float& v : acc.data) v = range > 0.0f ? (v - mn) / range : 0.5f;
  return acc;
}

}  // namespace degbench
