#pragma once

// Pattern banks: ingested directories of overlay images, and the procedural
// default banks addressed by integer id.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/image_io.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/patterns/flare.hpp"
#include "degbench/patterns/haze_texture.hpp"
#include "degbench/patterns/moire.hpp"
#include "degbench/patterns/rain.hpp"

namespace degbench {

enum class PatternKind { moire, flare, rain, haze };

inline std::string_view pattern_kind_name(PatternKind k) noexcept {
  switch (k) {
    case PatternKind::moire: return "moire";
    case PatternKind::flare: return "flare";
    case PatternKind::rain: return "rain";
    case PatternKind::haze: return "haze";
  }
  return "moire";
}

inline PatternKind parse_pattern_kind(std::string_view s) {
  if (s == "moire") return PatternKind::moire;
  if (s == "flare") return PatternKind::flare;
  if (s == "rain") return PatternKind::rain;
  if (s == "haze") return PatternKind::haze;
  fail(ErrorKind::format, "unknown pattern kind '" + std::string(s) + "'");
}

struct PatternBank {
  std::string kind_tag;
  std::vector<ImageBuffer> entries;  // RGBA
  std::vector<std::string> tags;     // per entry (source file stem)
  bool premultiplied = false;
  std::set<std::pair<int, int>> scale_levels;  // native (width, height) sizes
  std::vector<std::string> warnings;           // skipped files

  std::size_t size() const noexcept { return entries.size(); }
};

/// Load every decodable image in `dir` (sorted by file name). RGB and gray
/// entries gain alpha = luminance. Undecodable or non-image files are skipped
/// with a warning.
inline PatternBank load_pattern_bank(const std::filesystem::path& dir, std::string kind_tag) {
  require(std::filesystem::is_directory(dir), ErrorKind::io, "pattern bank '" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  PatternBank bank;
  bank.kind_tag = std::move(kind_tag);
  for (const auto& f : files) {
    try {
      ImageBuffer img = load_image(f);
      img = to_rgba(img, img.channels() == 4 ? AlphaFrom::opaque : AlphaFrom::luminance);
      bank.scale_levels.emplace(img.width(), img.height());
      bank.entries.push_back(std::move(img));
      bank.tags.push_back(f.stem().string());
    } catch (const Error& e) {
      bank.warnings.push_back("skipped '" + f.filename().string() + "': " + e.what());
    }
  }
  require(!bank.entries.empty(), ErrorKind::bank, "pattern bank '" + dir.string() + "' has no usable images");
  return bank;
}

/// Number of assets in each procedural default bank.
inline constexpr std::size_t procedural_bank_size(PatternKind k) noexcept {
  switch (k) {
    case PatternKind::moire: return 3000;
    case PatternKind::flare: return 3000;
    case PatternKind::rain: return 200;
    case PatternKind::haze: return 200;
  }
  return 0;
}

inline constexpr std::uint64_t kProceduralBankRoot = 0xB4A2C0DEULL;

inline Rng procedural_asset_rng(PatternKind k, std::size_t id) {
  return SeedTree(kProceduralBankRoot, {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(id)}).rng();
}

inline MoireParams procedural_moire_params(std::size_t id) {
  Rng rng = procedural_asset_rng(PatternKind::moire, id);
  return sample_moire_params(rng, static_cast<MoireScale>(id % 3));
}

inline RainStreakParams sample_rain_params(Rng& rng) {
  RainStreakParams p;
  p.density = rng.uniform(0.5, 2.0);
  p.length = rng.uniform(10.0, 40.0);
  p.angle = 1.5707963267948966 + rng.uniform(-0.3, 0.3);
  p.width = rng.uniform(1.0, 2.0);
  p.wind_jitter = rng.uniform(0.0, 0.3);
  return p;
}

inline RainStreakParams procedural_rain_params(std::size_t id) {
  Rng rng = procedural_asset_rng(PatternKind::rain, id);
  return sample_rain_params(rng);
}

/// Overlay assets for synthesis. An ingested bank replaces the procedural
/// bank of its kind; ids index the bank entries in file-name order.
struct AssetLibrary {
  std::optional<PatternBank> moire;
  std::optional<PatternBank> flare;
  std::optional<PatternBank> rain;
  std::optional<PatternBank> haze;

  const std::optional<PatternBank>& bank(PatternKind k) const noexcept {
    switch (k) {
      case PatternKind::moire: return moire;
      case PatternKind::flare: return flare;
      case PatternKind::rain: return rain;
      case PatternKind::haze: return haze;
    }
    return moire;
  }

  std::size_t size(PatternKind k) const noexcept {
    const auto& b = bank(k);
    return b ? b->size() : procedural_bank_size(k);
  }

  /// RGBA moire pattern at the image size.
  ImageBuffer moire_pattern(std::size_t id, int width, int height) const {
    check_id(PatternKind::moire, id);
    if (moire) return resize_image(moire->entries[id], width, height, Interp::bilinear);
    return gen_moire_pattern(procedural_moire_params(id), width, height);
  }

  /// RGBA flare sprite whose longer side is `extent` pixels.
  ImageBuffer flare_sprite(std::size_t id, int extent) const {
    check_id(PatternKind::flare, id);
    if (flare) {
      const ImageBuffer& e = flare->entries[id];
      const double s = static_cast<double>(extent) / std::max(e.width(), e.height());
      return resize_image(e, std::max(1, static_cast<int>(std::lround(e.width() * s))),
                          std::max(1, static_cast<int>(std::lround(e.height() * s))), Interp::bilinear);
    }
    Rng rng = procedural_asset_rng(PatternKind::flare, id);
    const double kelvin = rng.uniform(2500.0, 9000.0);
    return gen_flare_sprite(static_cast<FlareKind>(id % 3), 1.0, kelvin, kProceduralBankRoot ^ id, extent);
  }

  /// RGBA rain layer at the image size.
  ImageBuffer rain_pattern(std::size_t id, int width, int height) const {
    check_id(PatternKind::rain, id);
    if (rain) return resize_image(rain->entries[id], width, height, Interp::bilinear);
    return gen_rain_streaks(procedural_rain_params(id), width, height, kProceduralBankRoot ^ id).rgba;
  }

  /// Haze texture field in [0,1] at the image size.
  Plane haze_texture(std::size_t id, int width, int height) const {
    check_id(PatternKind::haze, id);
    if (haze) return resize_plane(gray_plane(haze->entries[id]), width, height, Interp::bilinear);
    return extract_channel(gen_haze_texture(width, height, 1 + static_cast<int>(id % 4), kProceduralBankRoot ^ id), 0);
  }

 private:
  void check_id(PatternKind k, std::size_t id) const {
    require(id < size(k), ErrorKind::parameter,
            std::string(pattern_kind_name(k)) + " asset id " + std::to_string(id) + " out of range");
  }
};

}  // namespace degbench
