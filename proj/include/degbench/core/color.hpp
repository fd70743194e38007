#pragma once

#include <cmath>

#include "degbench/core/image.hpp"

namespace degbench {

inline double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double v) {
  return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

// Alpha is left untouched by both conversions.
inline ImageBuffer to_linear(const ImageBuffer& img) {
  if (img.linear()) return img;
  ImageBuffer out = img;
  const int cc = img.color_channels();
  auto d = out.data();
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    for (int c = 0; c < cc; ++c) {
      float& v = d[p * img.channels() + c];
      v = static_cast<float>(srgb_to_linear(v));
    }
  out.clamp();
  out.set_linear(true);
  return out;
}

inline ImageBuffer to_srgb(const ImageBuffer& img) {
  if (!img.linear()) return img;
  ImageBuffer out = img;
  const int cc = img.color_channels();
  auto d = out.data();
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    for (int c = 0; c < cc; ++c) {
      float& v = d[p * img.channels() + c];
      v = static_cast<float>(linear_to_srgb(v));
    }
  out.clamp();
  out.set_linear(false);
  return out;
}

}  // namespace degbench
