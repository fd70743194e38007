#pragma once

// Baseline JPEG round trip computed in-process: 8x8 DCT, IJG quantization
// tables scaled by quality, optional 4:2:0 chroma subsampling. Entropy coding
// is lossless and therefore skipped; the result equals what a baseline
// decoder would reconstruct from the quantized coefficients.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/image.hpp"

namespace degbench {

namespace detail {

inline constexpr std::array<int, 64> kLumaQuant = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,  14, 13, 16, 24, 40,  57,
    69, 56, 14, 17, 22,  29,  51,  87,  80, 62, 18, 22, 37,  56,  68,  109, 103, 77, 24, 35, 55, 64,
    81, 104, 113, 92, 49, 64, 78,  87,  103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

inline constexpr std::array<int, 64> kChromaQuant = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

inline int quality_scale(int quality) noexcept { return quality < 50 ? 5000 / quality : 200 - 2 * quality; }

inline std::array<int, 64> scaled_table(const std::array<int, 64>& base, int quality) {
  const int scale = quality_scale(quality);
  std::array<int, 64> q{};
  for (std::size_t i = 0; i < 64; ++i) q[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return q;
}

struct DctBasis {
  std::array<double, 64> c{};  // c[u*8+x] = alpha(u) cos((2x+1) u pi / 16)
  DctBasis() {
    for (int u = 0; u < 8; ++u)
      for (int x = 0; x < 8; ++x)
        c[static_cast<std::size_t>(u * 8 + x)] =
            (u == 0 ? std::sqrt(0.125) : 0.5) * std::cos((2 * x + 1) * u * 3.14159265358979323846 / 16.0);
  }
};

inline const DctBasis& dct_basis() {
  static const DctBasis b;
  return b;
}

/// Quantize and reconstruct one 8x8 block in place (values level-shifted by -128).
inline void roundtrip_block(std::array<double, 64>& block, const std::array<int, 64>& q) {
  const auto& c = dct_basis().c;
  std::array<double, 64> tmp{}, coef{};
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double s = 0;
      for (int x = 0; x < 8; ++x) s += c[static_cast<std::size_t>(u * 8 + x)] * block[static_cast<std::size_t>(y * 8 + x)];
      tmp[static_cast<std::size_t>(y * 8 + u)] = s;
    }
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double s = 0;
      for (int y = 0; y < 8; ++y) s += c[static_cast<std::size_t>(v * 8 + y)] * tmp[static_cast<std::size_t>(y * 8 + u)];
      const double step = q[static_cast<std::size_t>(v * 8 + u)];
      coef[static_cast<std::size_t>(v * 8 + u)] = std::nearbyint(s / step) * step;
    }
  for (int v = 0; v < 8; ++v)
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int u = 0; u < 8; ++u) s += c[static_cast<std::size_t>(u * 8 + x)] * coef[static_cast<std::size_t>(v * 8 + u)];
      tmp[static_cast<std::size_t>(v * 8 + x)] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int v = 0; v < 8; ++v) s += c[static_cast<std::size_t>(v * 8 + y)] * tmp[static_cast<std::size_t>(v * 8 + x)];
      block[static_cast<std::size_t>(y * 8 + x)] = s;
    }
}

/// Round trip a component plane of size w x h (8-bit scale, edge-padded to
/// whole blocks); the decoded plane is rounded and clamped to 0..255.
inline void roundtrip_plane(std::vector<double>& plane, int w, int h, const std::array<int, 64>& q) {
  std::array<double, 64> block{};
  for (int by = 0; by < h; by += 8)
    for (int bx = 0; bx < w; bx += 8) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const int sx = std::min(bx + x, w - 1), sy = std::min(by + y, h - 1);
          block[static_cast<std::size_t>(y * 8 + x)] = plane[static_cast<std::size_t>(sy) * w + sx] - 128.0;
        }
      roundtrip_block(block, q);
      for (int y = 0; y < 8 && by + y < h; ++y)
        for (int x = 0; x < 8 && bx + x < w; ++x)
          plane[static_cast<std::size_t>(by + y) * w + bx + x] =
              std::clamp(std::nearbyint(block[static_cast<std::size_t>(y * 8 + x)] + 128.0), 0.0, 255.0);
    }
}

inline double to_byte(float v) noexcept { return std::nearbyint(std::clamp(v, 0.0f, 1.0f) * 255.0); }

}  // namespace detail

/// Whether a quality level encodes chroma at half resolution.
inline bool jpeg_subsamples_chroma(int quality) noexcept { return quality < 90; }

inline ImageBuffer apply_jpeg(const ImageBuffer& img, int quality) {
  require(quality >= 1 && quality <= 100, ErrorKind::parameter, "JPEG quality must lie in 1..100");
  const int w = img.width(), h = img.height();
  const std::size_t n = img.pixel_count();
  const auto lq = detail::scaled_table(detail::kLumaQuant, quality);
  ImageBuffer out = img;
  auto d = out.data();
  const int ch = img.channels();

  if (img.color_channels() == 1) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = detail::to_byte(img.data()[i * ch]);
    detail::roundtrip_plane(y, w, h, lq);
    for (std::size_t i = 0; i < n; ++i) d[i * ch] = static_cast<float>(y[i] / 255.0);
    return out;
  }

  const auto cq = detail::scaled_table(detail::kChromaQuant, quality);
  std::vector<double> Y(n), Cb(n), Cr(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = detail::to_byte(img.data()[i * ch]);
    const double g = detail::to_byte(img.data()[i * ch + 1]);
    const double b = detail::to_byte(img.data()[i * ch + 2]);
    Y[i] = 0.299 * r + 0.587 * g + 0.114 * b;
    Cb[i] = -0.168735892 * r - 0.331264108 * g + 0.5 * b + 128.0;
    Cr[i] = 0.5 * r - 0.418687589 * g - 0.081312411 * b + 128.0;
  }
  detail::roundtrip_plane(Y, w, h, lq);

  if (jpeg_subsamples_chroma(quality)) {
    const int cw = (w + 1) / 2, chh = (h + 1) / 2;
    std::vector<double> sb(static_cast<std::size_t>(cw) * chh), sr(sb.size());
    for (int y = 0; y < chh; ++y)
      for (int x = 0; x < cw; ++x) {
        double ab = 0, ar = 0;
        for (int k = 0; k < 4; ++k) {
          const int sx = std::min(2 * x + (k & 1), w - 1), sy = std::min(2 * y + (k >> 1), h - 1);
          ab += Cb[static_cast<std::size_t>(sy) * w + sx];
          ar += Cr[static_cast<std::size_t>(sy) * w + sx];
        }
        sb[static_cast<std::size_t>(y) * cw + x] = ab / 4.0;
        sr[static_cast<std::size_t>(y) * cw + x] = ar / 4.0;
      }
    detail::roundtrip_plane(sb, cw, chh, cq);
    detail::roundtrip_plane(sr, cw, chh, cq);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        Cb[static_cast<std::size_t>(y) * w + x] = sb[static_cast<std::size_t>(y / 2) * cw + x / 2];
        Cr[static_cast<std::size_t>(y) * w + x] = sr[static_cast<std::size_t>(y / 2) * cw + x / 2];
      }
  } else {
    detail::roundtrip_plane(Cb, w, h, cq);
    detail::roundtrip_plane(Cr, w, h, cq);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double y = Y[i], cb = Cb[i] - 128.0, cr = Cr[i] - 128.0;
    const double rgb[3] = {y + 1.402 * cr, y - 0.344136286 * cb - 0.714136286 * cr, y + 1.772 * cb};
    for (int c = 0; c < 3; ++c)
      d[i * ch + c] = static_cast<float>(std::clamp(std::nearbyint(rgb[c]), 0.0, 255.0) / 255.0);
  }
  return out;
}

}  // namespace degbench
