#pragma once

#include <cmath>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/patterns/sidecar.hpp"

namespace degbench {

/// Additive noise components; each is skipped when its sigma is zero.
struct NoiseParams {
  double sigma_gaussian = 0.0;       // i.i.d. per sample
  double sigma_grain = 0.0;          // low-passed field renormalized to this deviation
  double grain_size = 1.0;           // px, grain blur sigma = grain_size / 2
  std::vector<double> region_sigmas;  // per segmentation region, i.i.d. within region
};

/// Zero-mean field of N(0,1) samples blurred to the grain size and rescaled to `sigma`.
inline Plane grain_field(int width, int height, double sigma, double grain_size, Rng& rng) {
  Plane f(width, height);
  for (float& v : f.data) v = static_cast<float>(rng.normal());
  if (grain_size > 0.0) f = gaussian_blur(f, grain_size / 2.0);
  double mean = 0, var = 0;
  for (float v : f.data) mean += v;
  mean /= static_cast<double>(f.size());
  for (float v : f.data) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(f.size()));
  for (float& v : f.data) v = static_cast<float>(sd > 0 ? (v - mean) * sigma / sd : 0.0);
  return f;
}

/// Noise streams: gaussian from seed.child(0), grain from child(1), segment from child(2).
inline ImageBuffer apply_noise(const ImageBuffer& img, const NoiseParams& p, const SeedTree& seed,
                               const SegMask* mask = nullptr) {
  require(p.sigma_gaussian >= 0.0 && p.sigma_grain >= 0.0 && p.grain_size >= 0.0, ErrorKind::parameter,
          "noise sigmas must be >= 0");
  for (double s : p.region_sigmas) require(s >= 0.0, ErrorKind::parameter, "region sigmas must be >= 0");
  ImageBuffer out = img;
  const int ch = img.channels(), cc = img.color_channels();
  auto d = out.data();
  const std::size_t n = img.pixel_count();

  if (p.sigma_gaussian > 0.0) {
    Rng rng = seed.child(0).rng();
    for (std::size_t i = 0; i < n; ++i)
      for (int c = 0; c < cc; ++c) {
        float& v = d[i * ch + c];
        v = ImageBuffer::sanitize(static_cast<float>(v + p.sigma_gaussian * rng.normal()));
      }
  }
  if (p.sigma_grain > 0.0) {
    Rng rng = seed.child(1).rng();
    for (int c = 0; c < cc; ++c) {
      const Plane g = grain_field(img.width(), img.height(), p.sigma_grain, p.grain_size, rng);
      for (std::size_t i = 0; i < n; ++i) {
        float& v = d[i * ch + c];
        v = ImageBuffer::sanitize(v + g.data[i]);
      }
    }
  }
  if (!p.region_sigmas.empty()) {
    require(mask != nullptr, ErrorKind::parameter, "segment noise needs a segmentation mask");
    require(mask->width == img.width() && mask->height == img.height(), ErrorKind::shape,
            "segmentation mask does not match the image size");
    require(static_cast<int>(p.region_sigmas.size()) == mask->regions, ErrorKind::shape,
            "region sigma count does not match the mask's region count");
    Rng rng = seed.child(2).rng();
    for (std::size_t i = 0; i < n; ++i) {
      const double s = p.region_sigmas[static_cast<std::size_t>(mask->region_id[i])];
      for (int c = 0; c < cc; ++c) {
        const double z = rng.normal();
        if (s == 0.0) continue;
        float& v = d[i * ch + c];
        v = ImageBuffer::sanitize(static_cast<float>(v + s * z));
      }
    }
  }
  return out;
}

}  // namespace degbench
