#pragma once

// Severity-to-parameter mapping. Each severity-scaled parameter has a
// piecewise-linear curve of [lo, hi] ranges over severity; a parameter is
// drawn uniformly inside the range at the requested severity.
//
// Default map "default-v1" (identity at severity 0 -> range at severity 1):
//
//   task         parameter        s=0     s=1
//   blur         sigma            0       [3.5, 4.5]   gaussian, p = 0.5
//   blur         length           1       [19, 25]     motion, angle U(0, pi)
//   compression  quality          100     [5, 15]      no JPEG stage at s = 0
//   compression  resize           1       [0.25, 0.4]  chain (f, i), (1/f, i)
//   moire        weight           0       [0.3, 0.45]  1-3 patterns
//   low_light    scale            1       [0.15, 0.25]
//   low_light    gamma            1       [2.6, 3.0]
//   low_light    read_noise       0       [0.01, 0.03]
//   noise        sigma_gaussian   0       [0.08, 0.12]
//   noise        sigma_grain      0       [0.03, 0.06]  p = 0.5, size U(1, 2.5)
//   noise        region_sigma     0       [0, 0.08]     per mask region
//   flare        intensity        0       [0.7, 1.0]
//   reflection   alpha            1       [0.6, 0.8]
//   reflection   beta             0       [0.3, 0.5]    blur U(1, 3), ghost p = 0.5
//   haze         beta             0       [2.5, 3.5]    airlight U(0.8, 1)
//   haze         texture_weight   0       [0.2, 0.5]
//   rain         density          0       [2, 3]        streaks per 1000 px
//   rain         splash_prob      0       [0.2, 0.4]
//   rain         pattern_weight   0       [0.3, 0.6]    bank pattern, p = 0.3

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/core/task.hpp"
#include "degbench/degradations/params.hpp"
#include "degbench/patterns/bank.hpp"
#include "degbench/patterns/sidecar.hpp"

namespace degbench {

struct SeverityKnot {
  double severity = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Piecewise-linear [lo, hi] range over severity; knots sorted by severity.
struct ParamCurve {
  std::vector<SeverityKnot> knots;

  static ParamCurve linear(double identity, double lo, double hi) { return {{{0.0, identity, identity}, {1.0, lo, hi}}}; }

  Range at(double s) const {
    require(!knots.empty(), ErrorKind::parameter, "severity curve has no knots");
    if (s <= knots.front().severity) return {knots.front().lo, knots.front().hi};
    for (std::size_t i = 1; i < knots.size(); ++i) {
      const SeverityKnot& a = knots[i - 1];
      const SeverityKnot& b = knots[i];
      if (s == b.severity) return {b.lo, b.hi};
      if (s < b.severity) {
        const double t = b.severity > a.severity ? (s - a.severity) / (b.severity - a.severity) : 1.0;
        return {a.lo + t * (b.lo - a.lo), a.hi + t * (b.hi - a.hi)};
      }
    }
    return {knots.back().lo, knots.back().hi};
  }
};

struct SeverityMap {
  std::string version;
  std::map<TaskKind, std::map<std::string, ParamCurve>> curves;

  const ParamCurve& curve(TaskKind task, const std::string& name) const {
    const auto t = curves.find(task);
    require(t != curves.end(), ErrorKind::parameter, "severity map has no entry for " + std::string(task_name(task)));
    const auto c = t->second.find(name);
    require(c != t->second.end(), ErrorKind::parameter,
            "severity map has no curve '" + name + "' for " + std::string(task_name(task)));
    return c->second;
  }

  Range range(TaskKind task, const std::string& name, double severity) const { return curve(task, name).at(severity); }
};

inline SeverityMap default_severity_map() {
  using C = ParamCurve;
  SeverityMap m;
  m.version = "default-v1";
  m.curves[TaskKind::Blur] = {{"sigma", C::linear(0.0, 3.5, 4.5)}, {"length", C::linear(1.0, 19.0, 25.0)}};
  m.curves[TaskKind::Compression] = {{"quality", C::linear(100.0, 5.0, 15.0)},
                                     {"resize", C::linear(1.0, 0.25, 0.4)}};
  m.curves[TaskKind::Moire] = {{"weight", C::linear(0.0, 0.3, 0.45)}};
  m.curves[TaskKind::LowLight] = {{"scale", C::linear(1.0, 0.15, 0.25)},
                                  {"gamma", C::linear(1.0, 2.6, 3.0)},
                                  {"read_noise", C::linear(0.0, 0.01, 0.03)}};
  m.curves[TaskKind::Noise] = {{"sigma_gaussian", C::linear(0.0, 0.08, 0.12)},
                               {"sigma_grain", C::linear(0.0, 0.03, 0.06)},
                               {"region_sigma", C::linear(0.0, 0.0, 0.08)}};
  m.curves[TaskKind::Flare] = {{"intensity", C::linear(0.0, 0.7, 1.0)}};
  m.curves[TaskKind::Reflection] = {{"alpha", C::linear(1.0, 0.6, 0.8)}, {"beta", C::linear(0.0, 0.3, 0.5)}};
  m.curves[TaskKind::Haze] = {{"beta", C::linear(0.0, 2.5, 3.5)}, {"texture_weight", C::linear(0.0, 0.2, 0.5)}};
  m.curves[TaskKind::Rain] = {{"density", C::linear(0.0, 2.0, 3.0)},
                              {"splash_prob", C::linear(0.0, 0.2, 0.4)},
                              {"pattern_weight", C::linear(0.0, 0.3, 0.6)}};
  return m;
}

inline nlohmann::json severity_map_to_json(const SeverityMap& m) {
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& [task, curves] : m.curves) {
    nlohmann::json jc = nlohmann::json::object();
    for (const auto& [name, curve] : curves) {
      nlohmann::json knots = nlohmann::json::array();
      for (const auto& k : curve.knots) knots.push_back({k.severity, k.lo, k.hi});
      jc[name] = knots;
    }
    tasks[std::string(task_name(task))] = jc;
  }
  return {{"version", m.version}, {"tasks", tasks}};
}

inline SeverityMap severity_map_from_json(const nlohmann::json& j) {
  try {
    SeverityMap m;
    m.version = j.at("version").get<std::string>();
    for (const auto& [tname, jc] : j.at("tasks").items()) {
      auto& curves = m.curves[parse_task(tname)];
      for (const auto& [name, knots] : jc.items()) {
        ParamCurve c;
        for (const auto& k : knots) c.knots.push_back({k.at(0).get<double>(), k.at(1).get<double>(), k.at(2).get<double>()});
        require(std::is_sorted(c.knots.begin(), c.knots.end(),
                               [](const SeverityKnot& a, const SeverityKnot& b) { return a.severity < b.severity; }),
                ErrorKind::format, "severity knots must be sorted");
        curves[name] = std::move(c);
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, std::string("malformed severity map: ") + e.what());
  }
}

/// What the sampler needs to know about the record being synthesized.
struct SamplingContext {
  const AssetLibrary* assets = nullptr;  // procedural banks when null
  int mask_regions = 0;                   // segment noise is drawn only when > 0
  std::vector<std::string> reflection_sources;  // candidate reflection images
};

/// Draw operator parameters for `task` at `severity`. Severity 0 yields
/// identity-strength parameters.
inline DegradeParams severity_to_params(TaskKind task, double severity, const SeverityMap& map, const SeedTree& seed,
                                        const SamplingContext& ctx = {}) {
  require(severity >= 0.0 && severity <= 1.0 && std::isfinite(severity), ErrorKind::parameter,
          "severity must lie in [0,1]");
  static const AssetLibrary kProcedural;
  const AssetLibrary& assets = ctx.assets ? *ctx.assets : kProcedural;
  Rng rng = seed.rng();
  const double s = severity;
  auto draw = [&](const char* name) { return map.range(task, name, s).draw(rng); };
  constexpr double kPi = 3.14159265358979323846;

  switch (task) {
    case TaskKind::Blur: {
      BlurParams p;
      if (rng.bernoulli(0.5)) {
        p.mode = BlurMode::gaussian;
        p.sigma = draw("sigma");
      } else {
        p.mode = BlurMode::motion;
        p.length = draw("length");
        p.angle = rng.uniform(0.0, kPi);
      }
      return p;
    }
    case TaskKind::Compression: {
      CompressionParams p;
      const double q = draw("quality");
      if (s > 0.0) p.quality = std::clamp(static_cast<int>(std::lround(q)), 1, 100);
      const double f = draw("resize");
      const Interp in = rng.bernoulli(0.5) ? Interp::bilinear : Interp::bicubic;
      if (f != 1.0) p.resize_chain = {{f, in}, {1.0 / f, in}};
      return p;
    }
    case TaskKind::Moire: {
      MoireOpParams p;
      const int n = rng.uniform_int(1, 3);
      const std::size_t bank = assets.size(PatternKind::moire);
      for (int i = 0; i < n; ++i) {
        p.pattern_ids.push_back(static_cast<std::size_t>(rng.below(bank)));
        p.weights.push_back(draw("weight"));
      }
      return p;
    }
    case TaskKind::LowLight: {
      LowLightParams p;
      p.scale = draw("scale");
      p.gamma = draw("gamma");
      p.read_noise = draw("read_noise");
      return p;
    }
    case TaskKind::Noise: {
      NoiseParams p;
      p.sigma_gaussian = draw("sigma_gaussian");
      if (rng.bernoulli(0.5)) {
        p.sigma_grain = draw("sigma_grain");
        p.grain_size = rng.uniform(1.0, 2.5);
      }
      for (int r = 0; r < ctx.mask_regions; ++r) p.region_sigmas.push_back(draw("region_sigma"));
      return p;
    }
    case TaskKind::Flare: {
      FlareParams p;
      p.sprite_id = static_cast<std::size_t>(rng.below(assets.size(PatternKind::flare)));
      p.x = rng.uniform();
      p.y = rng.uniform();
      p.intensity = draw("intensity");
      p.sprite_scale = rng.uniform(0.6, 1.2);
      p.hflip = rng.bernoulli(0.5);
      p.vflip = rng.bernoulli(0.5);
      return p;
    }
    case TaskKind::Reflection: {
      ReflectionOpParams p;
      p.blend.alpha = draw("alpha");
      p.blend.beta = draw("beta");
      p.blend.blur_sigma = rng.uniform(1.0, 3.0);
      if (rng.bernoulli(0.5)) {
        p.blend.ghost_dx = rng.uniform_int(-8, 8);
        p.blend.ghost_dy = rng.uniform_int(-8, 8);
      }
      if (!ctx.reflection_sources.empty())
        p.source.path = ctx.reflection_sources[static_cast<std::size_t>(rng.below(ctx.reflection_sources.size()))];
      else
        p.source.scene_seed = rng.next_u64();
      return p;
    }
    case TaskKind::Haze: {
      HazeOpParams p;
      p.model.beta = draw("beta");
      p.model.airlight = rng.uniform(0.8, 1.0);
      p.model.texture_weight = draw("texture_weight");
      p.texture_id = static_cast<int>(rng.below(assets.size(PatternKind::haze)));
      return p;
    }
    case TaskKind::Rain: {
      RainParams p;
      p.streaks.density = draw("density");
      p.streaks.length = rng.uniform(15.0, 35.0);
      p.streaks.width = rng.uniform(1.0, 2.0);
      p.streaks.angle = kPi / 2.0 + rng.uniform(-0.25, 0.25);
      p.streaks.wind_jitter = rng.uniform(0.0, 0.3);
      p.splash_prob = draw("splash_prob");
      p.perspective_gain = rng.uniform(0.5, 1.0);
      if (rng.bernoulli(0.3)) {
        p.pattern_id = static_cast<int>(rng.below(assets.size(PatternKind::rain)));
        p.pattern_weight = draw("pattern_weight");
      }
      return p;
    }
  }
  fail(ErrorKind::parameter, "unknown task");
}

}  // namespace degbench
