#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "degbench/core/error.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"

namespace degbench {

enum class MoireScale { fine, medium, coarse };

inline std::string_view moire_scale_name(MoireScale s) noexcept {
  switch (s) {
    case MoireScale::fine: return "fine";
    case MoireScale::medium: return "medium";
    case MoireScale::coarse: return "coarse";
  }
  return "medium";
}

inline MoireScale parse_moire_scale(std::string_view s) {
  if (s == "fine") return MoireScale::fine;
  if (s == "medium") return MoireScale::medium;
  if (s == "coarse") return MoireScale::coarse;
  fail(ErrorKind::format, "unknown moire scale '" + std::string(s) + "'");
}

/// Grating frequency band, in cycles per image, for each scale level.
struct MoireBand {
  double lo;
  double hi;
};

inline constexpr MoireBand moire_band(MoireScale s) noexcept {
  switch (s) {
    case MoireScale::fine: return {48.0, 96.0};
    case MoireScale::medium: return {16.0, 48.0};
    case MoireScale::coarse: return {4.0, 16.0};
  }
  return {16.0, 48.0};
}

struct MoireParams {
  double freq_a = 20.0;  // cycles per image
  double freq_b = 21.0;
  double angle_a = 0.0;  // radians
  double angle_b = 0.0;
  double phase_a = 0.0;
  double phase_b = 0.0;
  MoireScale scale = MoireScale::medium;
  double chroma_gain = 0.0;  // [0,1]
};

inline nlohmann::json moire_params_to_json(const MoireParams& p) {
  return {{"freq_a", p.freq_a},   {"freq_b", p.freq_b},   {"angle_a", p.angle_a},
          {"angle_b", p.angle_b}, {"phase_a", p.phase_a}, {"phase_b", p.phase_b},
          {"scale", moire_scale_name(p.scale)}, {"chroma_gain", p.chroma_gain}};
}

/// A grating snapped to a whole number of cycles along each image axis.
struct WaveVector {
  long kx = 0;
  long ky = 0;
  friend bool operator==(const WaveVector&, const WaveVector&) = default;
};

inline WaveVector snap_grating(double freq, double angle) noexcept {
  return {std::lround(freq * std::cos(angle)), std::lround(freq * std::sin(angle))};
}

/// True when the two gratings collapse to the same (or opposite, or empty)
/// wave vector on the pixel grid, which would leave no interference beat.
inline bool moire_degenerate(const MoireParams& p) noexcept {
  const WaveVector a = snap_grating(p.freq_a, p.angle_a);
  const WaveVector b = snap_grating(p.freq_b, p.angle_b);
  const bool zero_a = a.kx == 0 && a.ky == 0;
  const bool zero_b = b.kx == 0 && b.ky == 0;
  return zero_a || zero_b || a == b || (a.kx == -b.kx && a.ky == -b.ky);
}

inline void validate(const MoireParams& p) {
  require(std::isfinite(p.freq_a) && std::isfinite(p.freq_b) && p.freq_a > 0 && p.freq_b > 0,
          ErrorKind::parameter, "moire frequencies must be positive");
  require(p.chroma_gain >= 0.0 && p.chroma_gain <= 1.0, ErrorKind::parameter, "chroma_gain must lie in [0,1]");
  require(!(p.freq_a == p.freq_b && p.angle_a == p.angle_b), ErrorKind::parameter,
          "identical moire gratings");
  require(!moire_degenerate(p), ErrorKind::parameter, "moire gratings are degenerate on the pixel grid");
}

/// pattern(x,y) = 0.5 + 0.5 sin(g_a) sin(g_b), with g_k = 2 pi (kx x / W + ky y / H) + phase_k.
/// Channel c shifts grating a by chroma_gain * (c-1) * 2 pi / 3. Alpha is 1.
inline ImageBuffer gen_moire_pattern(const MoireParams& p, int width, int height) {
  validate(p);
  constexpr double kTau = 6.283185307179586;
  const WaveVector a = snap_grating(p.freq_a, p.angle_a);
  const WaveVector b = snap_grating(p.freq_b, p.angle_b);
  ImageBuffer out(width, height, 4);
  std::array<double, 3> shift{};
  for (int c = 0; c < 3; ++c) shift[static_cast<std::size_t>(c)] = p.chroma_gain * (c - 1) * kTau / 3.0;
  for (int y = 0; y < height; ++y) {
    const double ya = kTau * static_cast<double>(a.ky) * y / height;
    const double yb = kTau * static_cast<double>(b.ky) * y / height;
    for (int x = 0; x < width; ++x) {
      const double ga = kTau * static_cast<double>(a.kx) * x / width + ya + p.phase_a;
      const double sb = std::sin(kTau * static_cast<double>(b.kx) * x / width + yb + p.phase_b);
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) = static_cast<float>(0.5 + 0.5 * std::sin(ga + shift[static_cast<std::size_t>(c)]) * sb);
      out.at(x, y, 3) = 1.0f;
    }
  }
  return out;
}

/// Draw non-degenerate parameters inside a scale band: two close frequencies
/// at close angles, which produces a visible low-frequency beat.
inline MoireParams sample_moire_params(Rng& rng, MoireScale scale) {
  constexpr double kPi = 3.14159265358979323846;
  const MoireBand band = moire_band(scale);
  for (;;) {
    MoireParams p;
    p.scale = scale;
    p.freq_a = rng.uniform(band.lo, band.hi);
    p.freq_b = p.freq_a * (1.0 + rng.uniform(0.02, 0.15) * (rng.bernoulli(0.5) ? 1.0 : -1.0));
    p.angle_a = rng.uniform(0.0, kPi);
    p.angle_b = p.angle_a + rng.uniform(-0.2, 0.2);
    p.phase_a = rng.uniform(0.0, 2.0 * kPi);
    p.phase_b = rng.uniform(0.0, 2.0 * kPi);
    p.chroma_gain = rng.uniform();
    if (!moire_degenerate(p)) return p;
  }
}

}  // namespace degbench
