#pragma once

// Operator dispatch: sample parameters from a severity, apply them, or replay
// recorded parameters. Seed layout per record: severity sampling draws from
// seed.child(0), the operator from child(1), the web chain from child(2).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/image_io.hpp"
#include "degbench/core/scene.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/degradations/blur.hpp"
#include "degbench/degradations/jpeg.hpp"
#include "degbench/degradations/noise.hpp"
#include "degbench/degradations/params.hpp"
#include "degbench/degradations/photometric.hpp"
#include "degbench/degradations/rain.hpp"
#include "degbench/degradations/severity.hpp"
#include "degbench/degradations/web_chain.hpp"
#include "degbench/patterns/bank.hpp"
#include "degbench/patterns/sidecar.hpp"

namespace degbench {

/// Per-record inputs beyond the clean image. Relative paths in parameters
/// (reflection sources, temporal frames) resolve against `base_dir`.
struct ApplyContext {
  const AssetLibrary* assets = nullptr;  // procedural banks when null
  const Plane* depth = nullptr;          // required for haze
  const SegMask* mask = nullptr;         // required for segment noise
  std::filesystem::path base_dir;
  std::function<ImageBuffer(const std::filesystem::path&)> loader;  // load_image when empty
};

namespace detail {

inline ImageBuffer load_via(const ApplyContext& ctx, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !ctx.base_dir.empty()) path = ctx.base_dir / path;
  return ctx.loader ? ctx.loader(path) : load_image(path);
}

}  // namespace detail

/// Apply one operator. `seed` is the operator's own stream.
inline ImageBuffer apply_params(const ImageBuffer& img, const DegradeParams& params, const SeedTree& seed,
                                const ApplyContext& ctx = {}) {
  static const AssetLibrary kProcedural;
  const AssetLibrary& assets = ctx.assets ? *ctx.assets : kProcedural;
  const int W = img.width(), H = img.height();

  struct Visitor {
    const ImageBuffer& img;
    const SeedTree& seed;
    const ApplyContext& ctx;
    const AssetLibrary& assets;
    int W, H;

    ImageBuffer operator()(const BlurParams& p) const {
      switch (p.mode) {
        case BlurMode::gaussian: return apply_gaussian_blur(img, p.sigma);
        case BlurMode::motion: return apply_motion_blur(img, p.length, p.angle);
        case BlurMode::temporal: {
          std::vector<ImageBuffer> frames;
          for (const auto& f : p.frames) frames.push_back(detail::load_via(ctx, f));
          return apply_temporal_average(frames).blurred;
        }
      }
      return img;
    }
    ImageBuffer operator()(const CompressionParams& p) const {
      if (p.quality) require(*p.quality >= 1 && *p.quality <= 100, ErrorKind::parameter, "JPEG quality must lie in 1..100");
      ImageBuffer out = apply_resize_chain(img, p.resize_chain);
      return p.quality ? apply_jpeg(out, *p.quality) : out;
    }
    ImageBuffer operator()(const MoireOpParams& p) const {
      require(!p.pattern_ids.empty() && p.pattern_ids.size() <= 3, ErrorKind::parameter,
              "moire takes one to three patterns");
      require(p.weights.size() == p.pattern_ids.size(), ErrorKind::parameter, "one weight per moire pattern");
      std::vector<ImageBuffer> patterns;
      for (std::size_t id : p.pattern_ids) patterns.push_back(assets.moire_pattern(id, W, H));
      return apply_moire(img, patterns, p.weights);
    }
    ImageBuffer operator()(const LowLightParams& p) const { return apply_lowlight(img, p, seed.rng()); }
    ImageBuffer operator()(const NoiseParams& p) const { return apply_noise(img, p, seed, ctx.mask); }
    ImageBuffer operator()(const FlareParams& p) const {
      if (p.intensity == 0.0) return img;
      require(p.sprite_scale > 0.0, ErrorKind::parameter, "flare sprite scale must be positive");
      const int extent = std::max(8, static_cast<int>(std::lround(p.sprite_scale * std::max(W, H))));
      return apply_flare(img, assets.flare_sprite(p.sprite_id, extent), p.x, p.y, p.intensity, p.hflip, p.vflip);
    }
    ImageBuffer operator()(const ReflectionOpParams& p) const {
      if (p.blend.beta == 0.0) return apply_reflection(img, img, p.blend);
      const ImageBuffer r =
          p.source.path.empty() ? calibration_scene(p.source.scene_seed, W, H) : detail::load_via(ctx, p.source.path);
      return apply_reflection(img, r, p.blend);
    }
    ImageBuffer operator()(const HazeOpParams& p) const {
      require(ctx.depth != nullptr, ErrorKind::parameter, "haze needs a depth map");
      if (p.texture_id >= 0 && p.model.texture_weight > 0.0) {
        const Plane tex = assets.haze_texture(static_cast<std::size_t>(p.texture_id), W, H);
        return apply_haze(img, *ctx.depth, p.model, &tex);
      }
      return apply_haze(img, *ctx.depth, p.model);
    }
    ImageBuffer operator()(const RainParams& p) const {
      if (p.pattern_id >= 0 && p.pattern_weight > 0.0) {
        const ImageBuffer pat = assets.rain_pattern(static_cast<std::size_t>(p.pattern_id), W, H);
        return apply_rain(img, p, seed, &pat);
      }
      return apply_rain(img, p, seed);
    }
  };
  return std::visit(Visitor{img, seed, ctx, assets, W, H}, params);
}

/// Replay recorded parameters with a record seed.
inline ImageBuffer apply_synth(const ImageBuffer& img, const SynthParams& p, const SeedTree& record_seed,
                               const ApplyContext& ctx = {}) {
  ImageBuffer out = apply_params(img, p.op, record_seed.child(1), ctx);
  if (!p.web_chain.empty()) out = apply_web_stages(out, p.web_chain, record_seed.child(2).child(1));
  return out;
}

/// Web chain settings for synthesis; the chain runs with probability `prob`.
struct WebChainOptions {
  double prob = 0.0;
  OrderPolicy order = OrderPolicy::fixed;
  WebChainConfig config;
};

struct SynthResult {
  ImageBuffer image;
  SynthParams params;
};

/// Sample parameters at `severity` and apply them. Replaying the returned
/// params with apply_synth and the same seed reproduces the image bit-exactly.
inline SynthResult synthesize(const ImageBuffer& img, TaskKind task, double severity, const SeverityMap& map,
                              const SeedTree& record_seed, const ApplyContext& ctx = {},
                              const WebChainOptions& web = {}, std::vector<std::string> reflection_sources = {}) {
  SamplingContext sc;
  sc.assets = ctx.assets;
  sc.mask_regions = ctx.mask ? ctx.mask->regions : 0;
  sc.reflection_sources = std::move(reflection_sources);
  SynthParams p{severity_to_params(task, severity, map, record_seed.child(0), sc), {}};
  ImageBuffer out = apply_params(img, p.op, record_seed.child(1), ctx);
  if (web.prob > 0.0) {
    const SeedTree ws = record_seed.child(2);
    Rng gate = ws.child(2).rng();
    if (gate.bernoulli(web.prob)) {
      auto r = apply_web_chain(out, ws, web.order, web.config);
      out = std::move(r.image);
      p.web_chain = std::move(r.applied);
    }
  }
  return {std::move(out), std::move(p)};
}

}  // namespace degbench
