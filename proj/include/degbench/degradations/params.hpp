#pragma once

// Tagged operator parameters and their JSON form. The JSON form is stored in
// manifests and is sufficient to replay a synthesis bit-exactly.

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/task.hpp"
#include "degbench/degradations/noise.hpp"
#include "degbench/degradations/photometric.hpp"
#include "degbench/degradations/rain.hpp"
#include "degbench/degradations/web_chain.hpp"

namespace degbench {

enum class BlurMode { gaussian, motion, temporal };

inline std::string_view blur_mode_name(BlurMode m) noexcept {
  switch (m) {
    case BlurMode::gaussian: return "gaussian";
    case BlurMode::motion: return "motion";
    case BlurMode::temporal: return "temporal";
  }
  return "gaussian";
}

inline BlurMode parse_blur_mode(std::string_view s) {
  if (s == "gaussian") return BlurMode::gaussian;
  if (s == "motion") return BlurMode::motion;
  if (s == "temporal") return BlurMode::temporal;
  fail(ErrorKind::format, "unknown blur mode '" + std::string(s) + "'");
}

struct BlurParams {
  BlurMode mode = BlurMode::gaussian;
  double sigma = 0.0;   // gaussian
  double length = 1.0;  // motion
  double angle = 0.0;   // motion, radians
  std::vector<std::string> frames;  // temporal: frame files, averaged
};

struct CompressionParams {
  std::optional<int> quality;  // no JPEG stage when empty
  std::vector<ResizeStep> resize_chain;
};

struct MoireOpParams {
  std::vector<std::size_t> pattern_ids;
  std::vector<double> weights;
};

struct FlareParams {
  std::size_t sprite_id = 0;
  double x = 0.5, y = 0.5;     // normalized position
  double intensity = 0.0;
  bool hflip = false, vflip = false;
  double sprite_scale = 1.0;  // sprite extent relative to the longer image side
};

/// Reflection layer source: another image file, or a procedural scene.
struct ReflectionSource {
  std::string path;               // used when non-empty
  std::uint64_t scene_seed = 0;
};

struct ReflectionOpParams {
  ReflectionParams blend;
  ReflectionSource source;
};

struct HazeOpParams {
  HazeParams model;
  int texture_id = -1;  // -1: no texture
};

using DegradeParams = std::variant<BlurParams, CompressionParams, MoireOpParams, LowLightParams, NoiseParams,
                                   FlareParams, ReflectionOpParams, HazeOpParams, RainParams>;

inline TaskKind task_of(const DegradeParams& p) noexcept {
  static constexpr TaskKind kinds[] = {TaskKind::Blur,  TaskKind::Compression, TaskKind::Moire,
                                       TaskKind::LowLight, TaskKind::Noise,     TaskKind::Flare,
                                       TaskKind::Reflection, TaskKind::Haze,    TaskKind::Rain};
  return kinds[p.index()];
}

/// Operator parameters plus an optional web-style chain applied afterwards.
struct SynthParams {
  DegradeParams op;
  std::vector<WebStage> web_chain;
};

namespace detail {

struct ToJson {
  nlohmann::json operator()(const BlurParams& p) const {
    nlohmann::json j = {{"kind", "blur"}, {"mode", blur_mode_name(p.mode)}};
    switch (p.mode) {
      case BlurMode::gaussian: j["sigma"] = p.sigma; break;
      case BlurMode::motion: j["length"] = p.length, j["angle"] = p.angle; break;
      case BlurMode::temporal: j["frames"] = p.frames; break;
    }
    return j;
  }
  nlohmann::json operator()(const CompressionParams& p) const {
    nlohmann::json chain = nlohmann::json::array();
    for (const auto& s : p.resize_chain) chain.push_back({{"scale", s.scale}, {"interp", interp_name(s.interp)}});
    return {{"kind", "compression"},
            {"quality", p.quality ? nlohmann::json(*p.quality) : nlohmann::json(nullptr)},
            {"resize_chain", chain}};
  }
  nlohmann::json operator()(const MoireOpParams& p) const {
    return {{"kind", "moire"}, {"pattern_ids", p.pattern_ids}, {"weights", p.weights}};
  }
  nlohmann::json operator()(const LowLightParams& p) const {
    return {{"kind", "low_light"}, {"scale", p.scale}, {"gamma", p.gamma}, {"read_noise", p.read_noise}, {"linear", p.linear}};
  }
  nlohmann::json operator()(const NoiseParams& p) const {
    return {{"kind", "noise"},
            {"sigma_gaussian", p.sigma_gaussian},
            {"sigma_grain", p.sigma_grain},
            {"grain_size", p.grain_size},
            {"region_sigmas", p.region_sigmas}};
  }
  nlohmann::json operator()(const FlareParams& p) const {
    return {{"kind", "flare"},         {"sprite_id", p.sprite_id}, {"position", {p.x, p.y}},
            {"intensity", p.intensity}, {"hflip", p.hflip},         {"vflip", p.vflip},
            {"sprite_scale", p.sprite_scale}};
  }
  nlohmann::json operator()(const ReflectionOpParams& p) const {
    nlohmann::json src = p.source.path.empty() ? nlohmann::json{{"scene_seed", p.source.scene_seed}}
                                               : nlohmann::json{{"path", p.source.path}};
    return {{"kind", "reflection"},
            {"alpha", p.blend.alpha},
            {"beta", p.blend.beta},
            {"blur_sigma", p.blend.blur_sigma},
            {"ghost_offset", {p.blend.ghost_dx, p.blend.ghost_dy}},
            {"source", src}};
  }
  nlohmann::json operator()(const HazeOpParams& p) const {
    return {{"kind", "haze"},
            {"beta", p.model.beta},
            {"airlight", p.model.airlight},
            {"texture_weight", p.model.texture_weight},
            {"texture_id", p.texture_id >= 0 ? nlohmann::json(p.texture_id) : nlohmann::json(nullptr)}};
  }
  nlohmann::json operator()(const RainParams& p) const {
    return {{"kind", "rain"},
            {"density", p.streaks.density},
            {"length", p.streaks.length},
            {"angle", p.streaks.angle},
            {"width", p.streaks.width},
            {"wind_jitter", p.streaks.wind_jitter},
            {"opacity", {p.streaks.opacity_lo, p.streaks.opacity_hi}},
            {"splash_prob", p.splash_prob},
            {"perspective_gain", p.perspective_gain},
            {"near_fraction", p.near_fraction},
            {"pattern_id", p.pattern_id >= 0 ? nlohmann::json(p.pattern_id) : nlohmann::json(nullptr)},
            {"pattern_weight", p.pattern_weight}};
  }
};

}  // namespace detail

inline nlohmann::json params_to_json(const DegradeParams& p) { return std::visit(detail::ToJson{}, p); }

inline nlohmann::json synth_params_to_json(const SynthParams& p) {
  nlohmann::json j = params_to_json(p.op);
  if (!p.web_chain.empty()) j["web_chain"] = p.web_chain;
  return j;
}

inline DegradeParams params_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "blur") {
      BlurParams p;
      p.mode = parse_blur_mode(j.at("mode").get<std::string>());
      if (p.mode == BlurMode::gaussian) p.sigma = j.at("sigma").get<double>();
      if (p.mode == BlurMode::motion) p.length = j.at("length").get<double>(), p.angle = j.at("angle").get<double>();
      if (p.mode == BlurMode::temporal) p.frames = j.at("frames").get<std::vector<std::string>>();
      return p;
    }
    if (kind == "compression") {
      CompressionParams p;
      if (!j.at("quality").is_null()) p.quality = j.at("quality").get<int>();
      for (const auto& s : j.at("resize_chain"))
        p.resize_chain.push_back({s.at("scale").get<double>(), parse_interp(s.at("interp").get<std::string>())});
      return p;
    }
    if (kind == "moire") {
      return MoireOpParams{j.at("pattern_ids").get<std::vector<std::size_t>>(), j.at("weights").get<std::vector<double>>()};
    }
    if (kind == "low_light") {
      return LowLightParams{j.at("scale").get<double>(), j.at("gamma").get<double>(), j.at("read_noise").get<double>(),
                            j.value("linear", false)};
    }
    if (kind == "noise") {
      NoiseParams p;
      p.sigma_gaussian = j.at("sigma_gaussian").get<double>();
      p.sigma_grain = j.at("sigma_grain").get<double>();
      p.grain_size = j.at("grain_size").get<double>();
      p.region_sigmas = j.at("region_sigmas").get<std::vector<double>>();
      return p;
    }
    if (kind == "flare") {
      FlareParams p;
      p.sprite_id = j.at("sprite_id").get<std::size_t>();
      p.x = j.at("position").at(0).get<double>();
      p.y = j.at("position").at(1).get<double>();
      p.intensity = j.at("intensity").get<double>();
      p.hflip = j.at("hflip").get<bool>();
      p.vflip = j.at("vflip").get<bool>();
      p.sprite_scale = j.value("sprite_scale", 1.0);
      return p;
    }
    if (kind == "reflection") {
      ReflectionOpParams p;
      p.blend.alpha = j.at("alpha").get<double>();
      p.blend.beta = j.at("beta").get<double>();
      p.blend.blur_sigma = j.at("blur_sigma").get<double>();
      p.blend.ghost_dx = j.at("ghost_offset").at(0).get<int>();
      p.blend.ghost_dy = j.at("ghost_offset").at(1).get<int>();
      const auto& src = j.at("source");
      if (src.contains("path")) p.source.path = src.at("path").get<std::string>();
      else p.source.scene_seed = src.at("scene_seed").get<std::uint64_t>();
      return p;
    }
    if (kind == "haze") {
      HazeOpParams p;
      p.model = {j.at("beta").get<double>(), j.at("airlight").get<double>(), j.at("texture_weight").get<double>()};
      p.texture_id = j.at("texture_id").is_null() ? -1 : j.at("texture_id").get<int>();
      return p;
    }
    if (kind == "rain") {
      RainParams p;
      p.streaks.density = j.at("density").get<double>();
      p.streaks.length = j.at("length").get<double>();
      p.streaks.angle = j.at("angle").get<double>();
      p.streaks.width = j.at("width").get<double>();
      p.streaks.wind_jitter = j.at("wind_jitter").get<double>();
      p.streaks.opacity_lo = j.at("opacity").at(0).get<double>();
      p.streaks.opacity_hi = j.at("opacity").at(1).get<double>();
      p.splash_prob = j.at("splash_prob").get<double>();
      p.perspective_gain = j.at("perspective_gain").get<double>();
      p.near_fraction = j.value("near_fraction", 0.25);
      p.pattern_id = j.at("pattern_id").is_null() ? -1 : j.at("pattern_id").get<int>();
      p.pattern_weight = j.at("pattern_weight").get<double>();
      return p;
    }
    fail(ErrorKind::format, "unknown params kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, std::string("malformed params: ") + e.what());
  }
}

inline SynthParams synth_params_from_json(const nlohmann::json& j) {
  SynthParams p{params_from_json(j), {}};
  if (j.contains("web_chain")) {
    require(j["web_chain"].is_array(), ErrorKind::format, "web_chain must be an array");
    for (const auto& s : j["web_chain"]) p.web_chain.push_back(s);
  }
  return p;
}

}  // namespace degbench
