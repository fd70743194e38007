#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "degbench/core/error.hpp"

namespace degbench {

/// Row-major interleaved floating image with samples in [0,1].
///
/// Samples are sRGB-encoded unless `linear()` is set. Channel count is 1
/// (gray), 3 (RGB) or 4 (RGBA, straight alpha). All operators in this library
/// return clamped buffers, so `data()` never holds values outside [0,1] or
/// non-finite values once an operator has produced it.
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(int width, int height, int channels, float fill = 0.0f)
      : width_(width), height_(height), channels_(channels) {
    check_dims();
    data_.assign(static_cast<std::size_t>(width) * height * channels, sanitize(fill));
  }

  ImageBuffer(int width, int height, int channels, std::vector<float> data)
      : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_dims();
    require(data_.size() == static_cast<std::size_t>(width) * height * channels, ErrorKind::shape,
            "sample count does not match width*height*channels");
    clamp();
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool linear() const noexcept { return linear_; }
  void set_linear(bool v) noexcept { linear_ = v; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  bool has_alpha() const noexcept { return channels_ == 4; }
  /// Channels that carry color (alpha excluded).
  int color_channels() const noexcept { return channels_ == 4 ? 3 : channels_; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  std::size_t index(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  float& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  float at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  bool same_shape(const ImageBuffer& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }
  bool same_size(const ImageBuffer& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  /// Clamp every sample to [0,1]; non-finite samples become 0.
  void clamp() noexcept {
    for (float& v : data_) v = sanitize(v);
  }

  friend bool operator==(const ImageBuffer& a, const ImageBuffer& b) {
    return a.same_shape(b) && a.linear_ == b.linear_ && a.data_ == b.data_;
  }

  static float sanitize(float v) noexcept {
    if (!std::isfinite(v)) return 0.0f;
    return std::clamp(v, 0.0f, 1.0f);
  }

 private:
  void check_dims() const {
    require(width_ > 0 && height_ > 0, ErrorKind::shape, "image dimensions must be positive");
    require(channels_ == 1 || channels_ == 3 || channels_ == 4, ErrorKind::shape,
            "channel count must be 1, 3 or 4, got " + std::to_string(channels_));
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  bool linear_ = false;
  std::vector<float> data_;
};

inline void require_same_size(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
  require(a.same_size(b), ErrorKind::shape,
          std::string(what) + ": " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
              " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
}

/// Luma of a pixel (Rec.709 weights on encoded values); gray images return the sample.
inline float luma(const ImageBuffer& img, int x, int y) noexcept {
  if (img.channels() == 1) return img.at(x, y, 0);
  return 0.2126f * img.at(x, y, 0) + 0.7152f * img.at(x, y, 1) + 0.0722f * img.at(x, y, 2);
}

/// Single-channel luma image.
inline ImageBuffer to_gray(const ImageBuffer& img) {
  if (img.channels() == 1) return img;
  ImageBuffer out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = ImageBuffer::sanitize(luma(img, x, y));
  return out;
}

/// Promote gray/RGB to RGBA with the given alpha rule, or copy RGBA through.
enum class AlphaFrom { opaque, luminance };

inline ImageBuffer to_rgba(const ImageBuffer& img, AlphaFrom rule) {
  if (img.channels() == 4) return img;
  ImageBuffer out(img.width(), img.height(), 4);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, img.channels() == 1 ? 0 : c);
      out.at(x, y, 3) = rule == AlphaFrom::opaque ? 1.0f : ImageBuffer::sanitize(luma(img, x, y));
    }
  }
  return out;
}

/// Mean of all color samples (alpha excluded).
inline double mean_color(const ImageBuffer& img) {
  double s = 0.0;
  const int cc = img.color_channels();
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    for (int c = 0; c < cc; ++c) s += img.data()[p * img.channels() + c];
  return s / (static_cast<double>(img.pixel_count()) * cc);
}

/// Largest absolute per-sample difference between two same-shape images.
inline double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
  require(a.same_shape(b), ErrorKind::shape, "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, static_cast<double>(std::fabs(a.data()[i] - b.data()[i])));
  return m;
}

}  // namespace degbench
