#pragma once

// Ingested per-image sidecars: depth maps for haze and segmentation masks for
// segment-aware noise.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/image_io.hpp"

namespace degbench {

/// Normalized depth, 0 = nearest, 1 = farthest.
struct DepthMap {
  Plane d;
  int width() const noexcept { return d.width; }
  int height() const noexcept { return d.height; }
};

/// Per-pixel region ids in {0..regions-1}.
struct SegMask {
  int width = 0;
  int height = 0;
  int regions = 0;
  std::vector<int> region_id;

  int at(int x, int y) const noexcept { return region_id[static_cast<std::size_t>(y) * width + x]; }
};

inline DepthMap depth_from_image(const ImageBuffer& img, int width, int height) {
  require(img.channels() == 1, ErrorKind::format, "depth map must be single-channel");
  DepthMap m{extract_channel(img, 0)};
  if (m.d.width != width || m.d.height != height) m.d = resize_plane(m.d, width, height, Interp::bilinear);
  for (float& v : m.d.data) v = std::clamp(v, 0.0f, 1.0f);
  return m;
}

/// Load a grayscale PNG (16-bit: v/65535, 8-bit: v/255) resampled to width x height.
inline DepthMap load_depth_map(const std::filesystem::path& path, int width, int height) {
  return depth_from_image(load_image(path), width, height);
}

inline void save_depth_map(const Plane& depth, const std::filesystem::path& path) {
  ImageBuffer img(depth.width, depth.height, 1);
  insert_channel(img, depth, 0);
  save_image(img, path, ImageFormat::png, SaveOptions{95, 16, 3});
}

/// Relabel raw ids to a contiguous range, preserving their order.
inline SegMask normalize_mask(int width, int height, const std::vector<int>& raw) {
  require(raw.size() == static_cast<std::size_t>(width) * height, ErrorKind::shape, "mask size mismatch");
  std::map<int, int> relabel;
  for (int v : raw) relabel.emplace(v, 0);
  int next = 0;
  for (auto& [k, v] : relabel) v = next++;
  SegMask m{width, height, next, std::vector<int>(raw.size())};
  for (std::size_t i = 0; i < raw.size(); ++i) m.region_id[i] = relabel[raw[i]];
  return m;
}

inline SegMask mask_from_image(const ImageBuffer& img, int width, int height) {
  require(img.channels() == 1, ErrorKind::format, "segmentation mask must be single-channel");
  std::vector<int> raw(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(img.height() - 1, static_cast<int>((y + 0.5) * img.height() / height));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(img.width() - 1, static_cast<int>((x + 0.5) * img.width() / width));
      raw[static_cast<std::size_t>(y) * width + x] = static_cast<int>(std::lround(img.at(sx, sy) * 255.0f));
    }
  }
  return normalize_mask(width, height, raw);
}

/// Load an 8-bit grayscale mask (id = pixel value), nearest-resampled to width x height.
inline SegMask load_seg_mask(const std::filesystem::path& path, int width, int height) {
  return mask_from_image(load_image(path), width, height);
}

inline void save_seg_mask(const SegMask& m, const std::filesystem::path& path) {
  require(m.regions <= 256, ErrorKind::parameter, "mask has more than 256 regions");
  ImageBuffer img(m.width, m.height, 1);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) img.at(x, y) = static_cast<float>(m.at(x, y)) / 255.0f;
  save_image(img, path, ImageFormat::png);
}

}  // namespace degbench
