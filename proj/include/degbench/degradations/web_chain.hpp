#pragma once

// Web-style degradation chains: downscale, noise, recompression and upscale,
// optionally repeated with milder settings.

#include <algorithm>
#include <array>
#include <cmath>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/degradations/jpeg.hpp"
#include "degbench/degradations/noise.hpp"

namespace degbench {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double draw(Rng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
};

struct WebPassConfig {
  double downscale_prob = 0.7;
  Range downscale{0.3, 0.9};
  double noise_prob = 0.7;
  double grain_prob = 0.4;  // share of noise stages that are granular
  Range noise_sigma{0.01, 0.05};
  Range grain_size{1.0, 3.0};
  double jpeg_prob = 0.8;
  Range jpeg_quality{30.0, 95.0};
};

struct WebChainConfig {
  WebPassConfig first;
  WebPassConfig second{0.5, {0.6, 1.0}, 0.5, 0.4, {0.005, 0.025}, {1.0, 2.0}, 0.6, {60.0, 95.0}};
  double second_pass_prob = 0.3;

  /// Every stage probability zero: the chain is always empty.
  static WebChainConfig disabled() {
    WebChainConfig c;
    for (WebPassConfig* p : {&c.first, &c.second}) p->downscale_prob = p->noise_prob = p->jpeg_prob = 0.0;
    c.second_pass_prob = 0.0;
    return c;
  }
};

enum class OrderPolicy { fixed, shuffled };

inline OrderPolicy parse_order_policy(std::string_view s) {
  if (s == "fixed") return OrderPolicy::fixed;
  if (s == "shuffled") return OrderPolicy::shuffled;
  fail(ErrorKind::format, "unknown order policy '" + std::string(s) + "'");
}

/// One applied stage, in the serialized form stored in manifests.
using WebStage = nlohmann::json;

namespace detail {

inline const std::array<Interp, 3> kWebInterps = {Interp::bilinear, Interp::bicubic, Interp::nearest};

inline void sample_pass(const WebPassConfig& cfg, OrderPolicy order, Rng& rng, std::vector<WebStage>& out) {
  std::array<int, 3> kinds = {0, 1, 2};  // downscale, noise, jpeg
  if (order == OrderPolicy::shuffled) rng.shuffle(std::span<int>(kinds));
  for (int k : kinds) {
    if (k == 0 && rng.bernoulli(cfg.downscale_prob)) {
      const Interp in = kWebInterps[rng.below(kWebInterps.size())];
      out.push_back({{"stage", "downscale"}, {"scale", cfg.downscale.draw(rng)}, {"interp", interp_name(in)}});
    } else if (k == 1 && rng.bernoulli(cfg.noise_prob)) {
      if (rng.bernoulli(cfg.grain_prob))
        out.push_back({{"stage", "noise"}, {"type", "grain"}, {"sigma", cfg.noise_sigma.draw(rng)},
                       {"grain_size", cfg.grain_size.draw(rng)}});
      else
        out.push_back({{"stage", "noise"}, {"type", "gaussian"}, {"sigma", cfg.noise_sigma.draw(rng)}});
    } else if (k == 2 && rng.bernoulli(cfg.jpeg_prob)) {
      out.push_back({{"stage", "jpeg"}, {"quality", static_cast<int>(std::lround(cfg.jpeg_quality.draw(rng)))}});
    }
  }
}

}  // namespace detail

/// Draw a stage list. The final upscale back to the input size is appended
/// whenever a downscale was drawn.
inline std::vector<WebStage> sample_web_chain(const WebChainConfig& cfg, OrderPolicy order, Rng& rng) {
  std::vector<WebStage> stages;
  detail::sample_pass(cfg.first, order, rng, stages);
  if (rng.bernoulli(cfg.second_pass_prob)) detail::sample_pass(cfg.second, order, rng, stages);
  const bool resized = std::any_of(stages.begin(), stages.end(), [](const WebStage& s) { return s["stage"] == "downscale"; });
  if (resized) {
    const Interp in = detail::kWebInterps[rng.below(2)];
    stages.push_back({{"stage", "upscale"}, {"interp", interp_name(in)}});
  }
  return stages;
}

/// Replay a stage list. Noise stage i draws from seed.child(i).
inline ImageBuffer apply_web_stages(const ImageBuffer& img, const std::vector<WebStage>& stages, const SeedTree& seed) {
  ImageBuffer cur = img;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const WebStage& s = stages[i];
    try {
      const std::string kind = s.at("stage").get<std::string>();
      if (kind == "downscale") {
        const double f = s.at("scale").get<double>();
        require(f > 0.0 && f <= 1.0, ErrorKind::parameter, "web downscale factor must lie in (0,1]");
        const int w = std::max(8, static_cast<int>(std::lround(cur.width() * f)));
        const int h = std::max(8, static_cast<int>(std::lround(cur.height() * f)));
        cur = resize_image(cur, w, h, parse_interp(s.at("interp").get<std::string>()));
      } else if (kind == "noise") {
        NoiseParams np;
        if (s.at("type") == "grain") {
          np.sigma_grain = s.at("sigma").get<double>();
          np.grain_size = s.at("grain_size").get<double>();
        } else {
          np.sigma_gaussian = s.at("sigma").get<double>();
        }
        cur = apply_noise(cur, np, seed.child(static_cast<std::uint32_t>(i)));
      } else if (kind == "jpeg") {
        cur = apply_jpeg(cur, s.at("quality").get<int>());
      } else if (kind == "upscale") {
        cur = resize_image(cur, img.width(), img.height(), parse_interp(s.at("interp").get<std::string>()));
      } else {
        fail(ErrorKind::format, "unknown web stage '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::format, std::string("malformed web stage: ") + e.what());
    }
  }
  if (cur.width() != img.width() || cur.height() != img.height())
    cur = resize_image(cur, img.width(), img.height(), Interp::bilinear);
  return cur;
}

struct WebChainResult {
  ImageBuffer image;
  std::vector<WebStage> applied;
};

/// Sampling uses seed.child(0); stage noise uses seed.child(1).
inline WebChainResult apply_web_chain(const ImageBuffer& img, const SeedTree& seed, OrderPolicy order,
                                      const WebChainConfig& cfg = {}) {
  Rng rng = seed.child(0).rng();
  auto stages = sample_web_chain(cfg, order, rng);
  ImageBuffer out = apply_web_stages(img, stages, seed.child(1));
  return {std::move(out), std::move(stages)};
}

}  // namespace degbench
