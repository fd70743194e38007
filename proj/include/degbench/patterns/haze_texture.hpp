#pragma once

#include <cstdint>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/core/value_noise.hpp"

namespace degbench {

/// Smooth value-noise field in [0,1]: 4 lattice cells per side at the first
/// octave, min-max normalized.
inline ImageBuffer gen_haze_texture(int width, int height, int octaves, std::uint64_t seed) {
  require(octaves >= 1 && octaves <= 6, ErrorKind::parameter, "haze octaves must lie in 1..6");
  Rng rng(SeedTree(seed, {0x4A2E}).key());
  const Plane field = fractal_noise(width, height, octaves, rng);
  ImageBuffer out(width, height, 1);
  insert_channel(out, field, 0);
  return out;
}

}  // namespace degbench
