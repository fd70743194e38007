#pragma once

// Pluggable degradation scorers and perceptual distances: built-in reference
// implementations plus ingestion of externally computed values.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/jsonl.hpp"
#include "degbench/core/task.hpp"
#include "degbench/metrics/heuristic.hpp"
#include "degbench/metrics/scores.hpp"

namespace degbench {

/// Key under which externally scored images are looked up: "<role>/<task>/<stem>".
inline std::string image_key(std::string_view role, TaskKind task, std::string_view stem) {
  return std::string(role) + "/" + std::string(task_name(task)) + "/" + std::string(stem);
}

/// Scores live in [1,5], 5 meaning clean. Implementations are reentrant.
class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  virtual std::string_view name() const = 0;
  virtual bool supports(TaskKind task) const = 0;
  virtual double score(const ImageBuffer& img, std::string_view id, TaskKind task) const = 0;
};

class HeuristicScorer final : public ScorerBackend {
 public:
  std::string_view name() const override { return "heuristic"; }
  bool supports(TaskKind task) const override { return heuristic_supports(task); }
  double score(const ImageBuffer& img, std::string_view, TaskKind task) const override {
    return heuristic_degradation_score(img, task);
  }
};

/// External scores, JSON Lines of {id, task, score}. Stored scores are clamped to [1,5].
class IngestedScorer final : public ScorerBackend {
 public:
  IngestedScorer() = default;

  void add(std::string id, TaskKind task, double score) {
    require(std::isfinite(score), ErrorKind::format, "non-finite score for " + id);
    scores_[{std::move(id), task}] = std::clamp(score, kMinScore, kMaxScore);
  }

  static IngestedScorer from_jsonl(const std::filesystem::path& path) {
    IngestedScorer s;
    for_each_jsonl(path, [&](const nlohmann::json& j) {
      s.add(j.at("id").get<std::string>(), parse_task(j.at("task").get<std::string>()), j.at("score").get<double>());
    });
    return s;
  }

  std::size_t size() const noexcept { return scores_.size(); }
  bool contains(std::string_view id, TaskKind task) const { return scores_.count({std::string(id), task}) > 0; }

  std::string_view name() const override { return "ingested"; }
  bool supports(TaskKind) const override { return true; }
  double score(const ImageBuffer&, std::string_view id, TaskKind task) const override {
    const auto it = scores_.find({std::string(id), task});
    if (it == scores_.end())
      fail(ErrorKind::lookup, "no ingested score for '" + std::string(id) + "' (" + std::string(task_name(task)) + ")");
    return it->second;
  }

 private:
  std::map<std::pair<std::string, TaskKind>, double> scores_;
};

/// RS = score(restored) - score(degraded). Never clamped.
inline double restoration_score(const ImageBuffer& degraded, std::string_view degraded_id, const ImageBuffer& restored,
                                std::string_view restored_id, TaskKind task, const ScorerBackend& backend) {
  require(backend.supports(task), ErrorKind::unsupported,
          std::string(backend.name()) + " scorer does not cover task " + std::string(task_name(task)));
  return backend.score(restored, restored_id, task) - backend.score(degraded, degraded_id, task);
}

struct DistanceResult {
  double lps = 0.0;
  bool resampled = false;  // b was resized to the dimensions of a
};

/// Perceptual distance in [0,1]; zero on identity and symmetric.
class DistanceBackend {
 public:
  virtual ~DistanceBackend() = default;
  virtual std::string_view name() const = 0;
  virtual DistanceResult dist(const ImageBuffer& a, std::string_view id_a, const ImageBuffer& b,
                              std::string_view id_b) const = 0;
};

inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

namespace detail {

inline Plane halve(const Plane& p) {
  Plane out(p.width / 2, p.height / 2);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      out.at(x, y) = 0.25f * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) + p.at(2 * x, 2 * y + 1) +
                              p.at(2 * x + 1, 2 * y + 1));
  return out;
}

inline Plane product(const Plane& a, const Plane& b) {
  Plane out(a.width, a.height);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = a.data[i] * b.data[i];
  return out;
}

/// Mean of luminance times contrast-structure over one scale, clamped to [0,1].
inline double ssim_scale(const Plane& a, const Plane& b, double sigma) {
  constexpr double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;
  const Plane ma = gaussian_blur(a, sigma), mb = gaussian_blur(b, sigma);
  const Plane aa = gaussian_blur(product(a, a), sigma), bb = gaussian_blur(product(b, b), sigma);
  const Plane ab = gaussian_blur(product(a, b), sigma);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double mx = ma.data[i], my = mb.data[i];
    const double vx = aa.data[i] - mx * mx, vy = bb.data[i] - my * my, cov = ab.data[i] - mx * my;
    const double l = (2.0 * (mx * my) + C1) / (mx * mx + my * my + C1);
    const double cs = (2.0 * cov + C2) / (vx + vy + C2);
    sum += l * cs;
  }
  return std::clamp(sum / static_cast<double>(a.size()), 0.0, 1.0);
}

}  // namespace detail

/// Number of dyadic scales used for a w x h image: up to five, fewer while the
/// coarsest scale would be narrower than the 11-tap window.
inline int ms_ssim_scales(int w, int h) {
  int m = 1;
  while (m < 5 && (std::min(w, h) >> m) >= 11) ++m;
  return m;
}

/// Weighted geometric mean of per-scale SSIM on luma, weights renormalized
/// over the scales used.
inline double ms_ssim(const ImageBuffer& a, const ImageBuffer& b, double sigma = 1.5) {
  require_same_size(a, b, "ms_ssim");
  Plane pa = gray_plane(a), pb = gray_plane(b);
  const int scales = ms_ssim_scales(a.width(), a.height());
  double wsum = 0.0;
  for (int j = 0; j < scales; ++j) wsum += kMsSsimWeights[static_cast<std::size_t>(j)];
  double log_sum = 0.0;
  for (int j = 0; j < scales; ++j) {
    const double s = detail::ssim_scale(pa, pb, sigma);
    if (s <= 0.0) return 0.0;
    log_sum += kMsSsimWeights[static_cast<std::size_t>(j)] / wsum * std::log(s);
    if (j + 1 < scales) pa = detail::halve(pa), pb = detail::halve(pb);
  }
  return std::exp(log_sum);
}

/// 1 - MS-SSIM, clamped to [0,1]. b is resampled to a's size when they differ.
class MsSsimDistance final : public DistanceBackend {
 public:
  std::string_view name() const override { return "ms_ssim"; }
  DistanceResult dist(const ImageBuffer& a, std::string_view, const ImageBuffer& b, std::string_view) const override {
    if (a.width() == b.width() && a.height() == b.height()) return {std::clamp(1.0 - ms_ssim(a, b), 0.0, 1.0), false};
    const ImageBuffer rb = resize_image(b, a.width(), a.height(), Interp::bicubic);
    return {std::clamp(1.0 - ms_ssim(a, rb), 0.0, 1.0), true};
  }
};

/// External distances, JSON Lines of {id_a, id_b, dist}; lookups are symmetric.
class IngestedDistance final : public DistanceBackend {
 public:
  void add(std::string id_a, std::string id_b, double d) {
    require(std::isfinite(d) && d >= 0.0 && d <= 1.0, ErrorKind::format,
            "ingested distance for " + id_a + " / " + id_b + " outside [0,1]");
    if (id_b < id_a) std::swap(id_a, id_b);
    dists_[{std::move(id_a), std::move(id_b)}] = d;
  }

  static IngestedDistance from_jsonl(const std::filesystem::path& path) {
    IngestedDistance s;
    for_each_jsonl(path, [&](const nlohmann::json& j) {
      s.add(j.at("id_a").get<std::string>(), j.at("id_b").get<std::string>(), j.at("dist").get<double>());
    });
    return s;
  }

  std::size_t size() const noexcept { return dists_.size(); }

  std::string_view name() const override { return "ingested"; }
  DistanceResult dist(const ImageBuffer&, std::string_view id_a, const ImageBuffer&,
                      std::string_view id_b) const override {
    std::string x(id_a), y(id_b);
    if (y < x) std::swap(x, y);
    const auto it = dists_.find({x, y});
    if (it == dists_.end())
      fail(ErrorKind::lookup, "no ingested distance for '" + std::string(id_a) + "' / '" + std::string(id_b) + "'");
    return {it->second, false};
  }

 private:
  std::map<std::pair<std::string, std::string>, double> dists_;
};

}  // namespace degbench
