#pragma once

// Shared pixel machinery: unclamped planes, border handling, separable and
// sparse convolution, resampling, translation and flips.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/image.hpp"

namespace degbench {

/// Single-channel float grid without range constraints (noise fields,
/// gradients, correlation maps).
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  Plane() = default;
  Plane(int w, int h, float fill = 0.0f) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  float& at(int x, int y) noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const noexcept { return data.size(); }
};

inline Plane extract_channel(const ImageBuffer& img, int c) {
  Plane p(img.width(), img.height());
  for (std::size_t i = 0; i < p.size(); ++i) p.data[i] = img.data()[i * img.channels() + c];
  return p;
}

inline void insert_channel(ImageBuffer& img, const Plane& p, int c) {
  auto d = img.data();
  for (std::size_t i = 0; i < p.size(); ++i) d[i * img.channels() + c] = ImageBuffer::sanitize(p.data[i]);
}

inline Plane gray_plane(const ImageBuffer& img) {
  Plane p(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) p.at(x, y) = luma(img, x, y);
  return p;
}

/// Mirror index without repeating the edge sample (…2 1 | 0 1 2 … n-1 | n-2 …).
inline int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

inline int clamp_index(int i, int n) noexcept { return std::clamp(i, 0, n - 1); }

/// Sampled Gaussian, truncated at ceil(3 sigma), normalized to sum 1.
inline std::vector<double> gaussian_kernel(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::parameter, "gaussian sigma must be positive");
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Separable convolution with odd-length kernels and reflect padding.
inline Plane convolve_separable(const Plane& src, const std::vector<double>& kx, const std::vector<double>& ky) {
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);
  Plane tmp(src.width, src.height);
  std::vector<int> xi(static_cast<std::size_t>(src.width + 2 * rx));
  for (int i = 0; i < static_cast<int>(xi.size()); ++i) xi[static_cast<std::size_t>(i)] = reflect_index(i - rx, src.width);
  for (int y = 0; y < src.height; ++y) {
    const float* row = &src.data[static_cast<std::size_t>(y) * src.width];
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < static_cast<int>(kx.size()); ++k)
        acc += kx[static_cast<std::size_t>(k)] * row[xi[static_cast<std::size_t>(x + k)]];
      tmp.at(x, y) = static_cast<float>(acc);
    }
  }
  Plane out(src.width, src.height);
  std::vector<double> acc(static_cast<std::size_t>(src.width));
  for (int y = 0; y < src.height; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int k = 0; k < static_cast<int>(ky.size()); ++k) {
      const int sy = reflect_index(y + k - ry, src.height);
      const double w = ky[static_cast<std::size_t>(k)];
      const float* row = &tmp.data[static_cast<std::size_t>(sy) * src.width];
      for (int x = 0; x < src.width; ++x) acc[static_cast<std::size_t>(x)] += w * row[x];
    }
    for (int x = 0; x < src.width; ++x) out.at(x, y) = static_cast<float>(acc[static_cast<std::size_t>(x)]);
  }
  return out;
}

inline Plane gaussian_blur(const Plane& src, double sigma) {
  if (sigma <= 0.0) return src;
  const auto k = gaussian_kernel(sigma);
  return convolve_separable(src, k, k);
}

struct Tap {
  int dx;
  int dy;
  double weight;
};

/// Sparse 2-D convolution (correlation form: out(x,y) = sum w * src(x+dx, y+dy)), reflect padding.
inline Plane convolve_taps(const Plane& src, const std::vector<Tap>& taps) {
  Plane out(src.width, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (const Tap& t : taps)
        acc += t.weight * src.at(reflect_index(x + t.dx, src.width), reflect_index(y + t.dy, src.height));
      out.at(x, y) = static_cast<float>(acc);
    }
  return out;
}

/// Apply a plane->plane function to each color channel; alpha is copied through.
template <typename Fn>
ImageBuffer map_color_planes(const ImageBuffer& img, Fn&& fn) {
  ImageBuffer out = img;
  for (int c = 0; c < img.color_channels(); ++c) insert_channel(out, fn(extract_channel(img, c), c), c);
  return out;
}

enum class Interp { nearest, bilinear, bicubic };

inline std::string_view interp_name(Interp i) noexcept {
  switch (i) {
    case Interp::nearest: return "nearest";
    case Interp::bilinear: return "bilinear";
    case Interp::bicubic: return "bicubic";
  }
  return "bilinear";
}

inline Interp parse_interp(std::string_view s) {
  if (s == "nearest") return Interp::nearest;
  if (s == "bilinear") return Interp::bilinear;
  if (s == "bicubic") return Interp::bicubic;
  fail(ErrorKind::format, "unknown interpolation '" + std::string(s) + "'");
}

namespace detail {

inline double interp_kernel(Interp mode, double x) noexcept {
  x = std::fabs(x);
  if (mode == Interp::bilinear) return x < 1.0 ? 1.0 - x : 0.0;
  // Keys cubic, a = -0.5
  constexpr double a = -0.5;
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

struct AxisWeights {
  std::vector<int> start;
  std::vector<int> count;
  std::vector<double> weights;  // count[i] entries per output sample, max_taps stride
  int max_taps = 0;
};

// Pixel-center aligned; the kernel is widened by the scale factor when
// minifying, which low-passes before decimation.
inline AxisWeights axis_weights(int in, int out, Interp mode) {
  AxisWeights w;
  w.start.resize(static_cast<std::size_t>(out));
  w.count.resize(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  const double fscale = std::max(1.0, scale);
  const double support = (mode == Interp::bilinear ? 1.0 : 2.0) * fscale;
  w.max_taps = static_cast<int>(std::ceil(support)) * 2 + 1;
  w.weights.assign(static_cast<std::size_t>(out) * w.max_taps, 0.0);
  for (int o = 0; o < out; ++o) {
    const double center = (o + 0.5) * scale;
    int lo = static_cast<int>(std::floor(center - support));
    int hi = static_cast<int>(std::ceil(center + support));
    lo = std::max(lo, 0);
    hi = std::min(hi, in);
    double sum = 0.0;
    int n = 0;
    double* ws = &w.weights[static_cast<std::size_t>(o) * w.max_taps];
    for (int i = lo; i < hi && n < w.max_taps; ++i, ++n) {
      const double v = interp_kernel(mode, (i + 0.5 - center) / fscale);
      ws[n] = v;
      sum += v;
    }
    if (sum != 0.0)
      for (int k = 0; k < n; ++k) ws[k] /= sum;
    w.start[static_cast<std::size_t>(o)] = lo;
    w.count[static_cast<std::size_t>(o)] = n;
  }
  return w;
}

}  // namespace detail

inline Plane resize_plane(const Plane& src, int out_w, int out_h, Interp mode) {
  require(out_w > 0 && out_h > 0, ErrorKind::parameter, "resize target must be positive");
  if (out_w == src.width && out_h == src.height) return src;
  Plane out(out_w, out_h);
  if (mode == Interp::nearest) {
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
      const int iy = clamp_index(static_cast<int>(std::floor((y + 0.5) * sy)), src.height);
      for (int x = 0; x < out_w; ++x)
        out.at(x, y) = src.at(clamp_index(static_cast<int>(std::floor((x + 0.5) * sx)), src.width), iy);
    }
    return out;
  }
  const auto wx = detail::axis_weights(src.width, out_w, mode);
  const auto wy = detail::axis_weights(src.height, out_h, mode);
  Plane tmp(out_w, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < out_w; ++x) {
      const double* ws = &wx.weights[static_cast<std::size_t>(x) * wx.max_taps];
      const int s = wx.start[static_cast<std::size_t>(x)];
      double acc = 0.0;
      for (int k = 0; k < wx.count[static_cast<std::size_t>(x)]; ++k) acc += ws[k] * src.at(s + k, y);
      tmp.at(x, y) = static_cast<float>(acc);
    }
  for (int y = 0; y < out_h; ++y) {
    const double* ws = &wy.weights[static_cast<std::size_t>(y) * wy.max_taps];
    const int s = wy.start[static_cast<std::size_t>(y)];
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < wy.count[static_cast<std::size_t>(y)]; ++k) acc += ws[k] * tmp.at(x, s + k);
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

/// Resize every channel (alpha included); output is clamped.
inline ImageBuffer resize_image(const ImageBuffer& img, int out_w, int out_h, Interp mode) {
  if (out_w == img.width() && out_h == img.height()) return img;
  ImageBuffer out(out_w, out_h, img.channels());
  out.set_linear(img.linear());
  for (int c = 0; c < img.channels(); ++c) insert_channel(out, resize_plane(extract_channel(img, c), out_w, out_h, mode), c);
  return out;
}

/// out(x, y) = src(x - dx, y - dy): content moves by (+dx, +dy); edges replicate.
inline Plane translate_plane(const Plane& src, int dx, int dy) {
  Plane out(src.width, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x)
      out.at(x, y) = src.at(clamp_index(x - dx, src.width), clamp_index(y - dy, src.height));
  return out;
}

inline ImageBuffer flip_image(const ImageBuffer& img, bool horizontal, bool vertical) {
  if (!horizontal && !vertical) return img;
  ImageBuffer out(img.width(), img.height(), img.channels());
  out.set_linear(img.linear());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const int sx = horizontal ? img.width() - 1 - x : x;
      const int sy = vertical ? img.height() - 1 - y : y;
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  return out;
}

}  // namespace degbench
