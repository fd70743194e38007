#pragma once

// Compression-side resampling, overlay blends and photometric operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "degbench/core/color.hpp"
#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"

namespace degbench {

struct ResizeStep {
  double scale = 1.0;
  Interp interp = Interp::bilinear;
  friend bool operator==(const ResizeStep&, const ResizeStep&) = default;
};

/// Resample by each step's factor in turn, then back to the input size with
/// the last step's interpolation.
inline ImageBuffer apply_resize_chain(const ImageBuffer& img, const std::vector<ResizeStep>& chain) {
  if (chain.empty()) return img;
  int w = img.width(), h = img.height();
  ImageBuffer cur = img;
  for (const ResizeStep& s : chain) {
    require(s.scale > 0.0 && std::isfinite(s.scale), ErrorKind::parameter, "resize scale must be positive");
    w = std::max(1, static_cast<int>(std::lround(w * s.scale)));
    h = std::max(1, static_cast<int>(std::lround(h * s.scale)));
    require(w >= 8 && h >= 8, ErrorKind::parameter,
            "resize chain shrinks the image below 8x8 (" + std::to_string(w) + "x" + std::to_string(h) + ")");
    cur = resize_image(cur, w, h, s.interp);
  }
  return resize_image(cur, img.width(), img.height(), chain.back().interp);
}

/// Blend up to three RGBA overlays: out = img (1 - sum w_i a_i) + sum w_i a_i p_i.
inline ImageBuffer apply_moire(const ImageBuffer& img, const std::vector<ImageBuffer>& patterns,
                               const std::vector<double>& weights) {
  require(!patterns.empty() && patterns.size() <= 3, ErrorKind::parameter, "moire takes one to three patterns");
  require(weights.size() == patterns.size(), ErrorKind::parameter, "one weight per moire pattern");
  for (double w : weights) require(w >= 0.0 && w <= 1.0, ErrorKind::parameter, "moire weights must lie in [0,1]");
  for (const auto& p : patterns) {
    require(p.channels() == 4, ErrorKind::shape, "moire patterns must be RGBA");
    require_same_size(img, p, "moire pattern");
  }
  ImageBuffer out = img;
  const int cc = img.color_channels();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < cc; ++c) {
        double keep = 1.0, add = 0.0;
        for (std::size_t i = 0; i < patterns.size(); ++i) {
          const double wa = weights[i] * patterns[i].at(x, y, 3);
          const double pv = cc == 1 ? luma(patterns[i], x, y) : patterns[i].at(x, y, c);
          keep -= wa;
          add += wa * pv;
        }
        out.at(x, y, c) = ImageBuffer::sanitize(static_cast<float>(img.at(x, y, c) * keep + add));
      }
  return out;
}

struct LowLightParams {
  double scale = 1.0;       // s in (0,1]
  double gamma = 1.0;       // [1,4]
  double read_noise = 0.0;  // sigma_r in [0,0.05]
  bool linear = false;      // operate on linear-light values
};

/// out = clamp(s * img^gamma + N(0, sigma_r)) per color sample.
inline ImageBuffer apply_lowlight(const ImageBuffer& img, const LowLightParams& p, Rng rng) {
  require(p.scale > 0.0 && p.scale <= 1.0, ErrorKind::parameter, "low-light scale must lie in (0,1]");
  require(p.gamma >= 1.0 && p.gamma <= 4.0, ErrorKind::parameter, "low-light gamma must lie in [1,4]");
  require(p.read_noise >= 0.0 && p.read_noise <= 0.05, ErrorKind::parameter, "read noise must lie in [0,0.05]");
  ImageBuffer out = p.linear ? to_linear(img) : img;
  const int ch = out.channels(), cc = out.color_channels();
  auto d = out.data();
  for (std::size_t i = 0; i < out.pixel_count(); ++i)
    for (int c = 0; c < cc; ++c) {
      float& v = d[i * ch + c];
      double r = p.scale * std::pow(static_cast<double>(v), p.gamma);
      if (p.read_noise > 0.0) r += p.read_noise * rng.normal();
      v = ImageBuffer::sanitize(static_cast<float>(r));
    }
  return p.linear ? to_srgb(out) : out;
}

/// Screen-composite a sprite centered at a normalized position:
/// out = 1 - (1 - img)(1 - intensity * alpha * sprite), evaluated as img + (1 - img) s.
inline ImageBuffer apply_flare(const ImageBuffer& img, const ImageBuffer& sprite, double pos_x, double pos_y,
                               double intensity, bool hflip, bool vflip) {
  require(pos_x >= 0.0 && pos_x <= 1.0 && pos_y >= 0.0 && pos_y <= 1.0, ErrorKind::parameter,
          "flare position must lie in [0,1]^2");
  require(intensity >= 0.0 && intensity <= 1.0, ErrorKind::parameter, "flare intensity must lie in [0,1]");
  require(sprite.channels() == 4, ErrorKind::shape, "flare sprite must be RGBA");
  if (intensity == 0.0) return img;
  const ImageBuffer s = flip_image(sprite, hflip, vflip);
  const int ox = static_cast<int>(std::lround(pos_x * img.width() - s.width() / 2.0));
  const int oy = static_cast<int>(std::lround(pos_y * img.height() - s.height() / 2.0));
  ImageBuffer out = img;
  const int cc = img.color_channels();
  const int x0 = std::max(0, ox), x1 = std::min(img.width(), ox + s.width());
  const int y0 = std::max(0, oy), y1 = std::min(img.height(), oy + s.height());
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const double a = intensity * s.at(x - ox, y - oy, 3);
      if (a <= 0.0) continue;
      for (int c = 0; c < cc; ++c) {
        const double sv = a * (cc == 1 ? luma(s, x - ox, y - oy) : s.at(x - ox, y - oy, c));
        const double v = img.at(x, y, c);
        out.at(x, y, c) = ImageBuffer::sanitize(static_cast<float>(v + (1.0 - v) * sv));
      }
    }
  return out;
}

/// Screen-composite an RGBA layer (scaled by `weight`) over the whole image.
inline void screen_layer(ImageBuffer& img, const ImageBuffer& layer, double weight) {
  require(layer.channels() == 4, ErrorKind::shape, "overlay layer must be RGBA");
  require_same_size(img, layer, "overlay layer");
  const int cc = img.color_channels();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double a = weight * layer.at(x, y, 3);
      if (a <= 0.0) continue;
      for (int c = 0; c < cc; ++c) {
        const double sv = a * (cc == 1 ? luma(layer, x, y) : layer.at(x, y, c));
        float& v = img.at(x, y, c);
        v = ImageBuffer::sanitize(static_cast<float>(v + (1.0 - v) * sv));
      }
    }
}

struct ReflectionParams {
  double alpha = 1.0;       // [0.5,1]
  double beta = 0.0;        // [0,0.5]
  double blur_sigma = 0.0;  // px
  int ghost_dx = 0;
  int ghost_dy = 0;
};

inline constexpr double kGhostWeight = 0.4;

/// out = clamp(alpha T + beta (G(R) + 0.4 shift(G(R))) / 1.4); the ghost term
/// is dropped when the offset is (0,0). R is resampled to T's size if needed.
inline ImageBuffer apply_reflection(const ImageBuffer& transmission, const ImageBuffer& reflection,
                                    const ReflectionParams& p) {
  require(p.alpha >= 0.5 && p.alpha <= 1.0, ErrorKind::parameter, "reflection alpha must lie in [0.5,1]");
  require(p.beta >= 0.0 && p.beta <= 0.5, ErrorKind::parameter, "reflection beta must lie in [0,0.5]");
  require(p.blur_sigma >= 0.0, ErrorKind::parameter, "reflection blur must be >= 0");
  const int w = transmission.width(), h = transmission.height();
  const int cc = transmission.color_channels();
  const ImageBuffer r = resize_image(reflection, w, h, Interp::bilinear);
  const bool ghost = p.ghost_dx != 0 || p.ghost_dy != 0;
  ImageBuffer out = transmission;
  for (int c = 0; c < cc; ++c) {
    Plane rp = cc == 1 ? gray_plane(r) : extract_channel(r, r.color_channels() == 1 ? 0 : c);
    rp = gaussian_blur(rp, p.blur_sigma);
    Plane layer = rp;
    if (ghost) {
      const Plane shifted = translate_plane(rp, p.ghost_dx, p.ghost_dy);
      for (std::size_t i = 0; i < layer.size(); ++i)
        layer.data[i] = static_cast<float>((rp.data[i] + kGhostWeight * shifted.data[i]) / (1.0 + kGhostWeight));
    }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out.at(x, y, c) = ImageBuffer::sanitize(
            static_cast<float>(p.alpha * transmission.at(x, y, c) + p.beta * layer.at(x, y)));
  }
  return out;
}

struct HazeParams {
  double beta = 0.0;            // [0,4]
  double airlight = 1.0;        // [0.6,1]
  double texture_weight = 0.0;  // [0,0.6]
};

/// Atmospheric scattering: t = exp(-beta d); base = J t + A (1 - t);
/// out = (1 - w tau) base + w tau A.
inline ImageBuffer apply_haze(const ImageBuffer& img, const Plane& depth, const HazeParams& p,
                              const Plane* texture = nullptr) {
  require(p.beta >= 0.0 && std::isfinite(p.beta), ErrorKind::parameter, "haze beta must be >= 0");
  require(p.airlight >= 0.0 && p.airlight <= 1.0, ErrorKind::parameter, "airlight must lie in [0,1]");
  require(p.texture_weight >= 0.0 && p.texture_weight <= 1.0, ErrorKind::parameter,
          "haze texture weight must lie in [0,1]");
  require(depth.width == img.width() && depth.height == img.height(), ErrorKind::shape,
          "depth map does not match the image size");
  if (texture)
    require(texture->width == img.width() && texture->height == img.height(), ErrorKind::shape,
            "haze texture does not match the image size");
  const double w = texture ? p.texture_weight : 0.0;
  const double A = p.airlight;
  ImageBuffer out = img;
  const int cc = img.color_channels();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double t = std::exp(-p.beta * depth.at(x, y));
      const double wt = texture ? w * texture->at(x, y) : 0.0;
      for (int c = 0; c < cc; ++c) {
        const double base = img.at(x, y, c) * t + A * (1.0 - t);
        out.at(x, y, c) = ImageBuffer::sanitize(static_cast<float>((1.0 - wt) * base + wt * A));
      }
    }
  return out;
}

}  // namespace degbench
