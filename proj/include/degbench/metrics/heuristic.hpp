#pragma once

// No-reference degradation statistics for the five tasks that have one, and
// their fixed piecewise-linear mapping onto the 1-5 score scale.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/task.hpp"
#include "degbench/metrics/scores.hpp"

namespace degbench {

inline bool heuristic_supports(TaskKind t) noexcept {
  return t == TaskKind::Blur || t == TaskKind::Noise || t == TaskKind::LowLight || t == TaskKind::Haze ||
         t == TaskKind::Compression;
}

namespace detail {

inline double median_inplace(std::vector<float>& v) {
  require(!v.empty(), ErrorKind::parameter, "median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
  return m;
}

/// Running minimum over a (2r+1) window along rows then columns, clamped borders.
inline Plane min_filter(const Plane& p, int r) {
  Plane tmp(p.width, p.height), out(p.width, p.height);
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      float m = p.at(x, y);
      for (int k = std::max(0, x - r); k <= std::min(p.width - 1, x + r); ++k) m = std::min(m, p.at(k, y));
      tmp.at(x, y) = m;
    }
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      float m = tmp.at(x, y);
      for (int k = std::max(0, y - r); k <= std::min(p.height - 1, y + r); ++k) m = std::min(m, tmp.at(x, k));
      out.at(x, y) = m;
    }
  return out;
}

}  // namespace detail

/// log of the variance of the 4-neighbour Laplacian of luma (interior pixels).
inline double blur_statistic(const ImageBuffer& img) {
  const Plane g = gray_plane(img);
  require(g.width >= 3 && g.height >= 3, ErrorKind::shape, "image too small for the blur statistic");
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (int y = 1; y + 1 < g.height; ++y)
    for (int x = 1; x + 1 < g.width; ++x) {
      const double l = g.at(x - 1, y) + g.at(x + 1, y) + g.at(x, y - 1) + g.at(x, y + 1) - 4.0 * g.at(x, y);
      sum += l, sq += l * l, ++n;
    }
  const double mean = sum / static_cast<double>(n);
  return std::log(std::max(sq / static_cast<double>(n) - mean * mean, 0.0) + 1e-10);
}

/// Noise deviation estimate: median absolute deviation of the luma residual
/// under the second-difference mask [1 -2 1]^T [1 -2 1], scaled to sigma units.
inline double noise_statistic(const ImageBuffer& img) {
  const Plane g = gray_plane(img);
  require(g.width >= 3 && g.height >= 3, ErrorKind::shape, "image too small for the noise statistic");
  std::vector<float> r;
  r.reserve(static_cast<std::size_t>(g.width - 2) * static_cast<std::size_t>(g.height - 2));
  constexpr int k[3] = {1, -2, 1};
  for (int y = 1; y + 1 < g.height; ++y)
    for (int x = 1; x + 1 < g.width; ++x) {
      double acc = 0;
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) acc += k[i + 1] * k[j + 1] * g.at(x + i, y + j);
      r.push_back(static_cast<float>(acc / 6.0));  // unit gain on white noise
    }
  const double med = detail::median_inplace(r);
  for (float& v : r) v = static_cast<float>(std::fabs(v - med));
  return detail::median_inplace(r) / 0.6744897501960817;
}

/// Mean luma.
inline double lowlight_statistic(const ImageBuffer& img) {
  const Plane g = gray_plane(img);
  double s = 0;
  for (float v : g.data) s += v;
  return s / static_cast<double>(g.size());
}

/// Mean of the dark channel: per-pixel minimum over color channels, then a
/// 15x15 minimum filter.
inline double haze_statistic(const ImageBuffer& img) {
  Plane m(img.width(), img.height(), 1.0f);
  for (int c = 0; c < img.color_channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) m.at(x, y) = std::min(m.at(x, y), img.at(x, y, c));
  const Plane dark = detail::min_filter(m, 7);
  double s = 0;
  for (float v : dark.data) s += v;
  return s / static_cast<double>(dark.size());
}

/// Mean absolute luma step across 8x8 block boundaries divided by the mean
/// step inside blocks.
inline double compression_statistic(const ImageBuffer& img) {
  const Plane g = gray_plane(img);
  require(g.width >= 16 && g.height >= 16, ErrorKind::shape, "image too small for the blockiness statistic");
  double inter = 0, intra = 0;
  std::size_t ni = 0, na = 0;
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x + 1 < g.width; ++x) {
      const double d = std::fabs(g.at(x + 1, y) - g.at(x, y));
      if ((x + 1) % 8 == 0) inter += d, ++ni;
      else intra += d, ++na;
    }
  for (int y = 0; y + 1 < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      const double d = std::fabs(g.at(x, y + 1) - g.at(x, y));
      if ((y + 1) % 8 == 0) inter += d, ++ni;
      else intra += d, ++na;
    }
  inter /= static_cast<double>(ni);
  intra /= static_cast<double>(na);
  return (inter + 1e-4) / (intra + 1e-4);
}

inline double heuristic_statistic(const ImageBuffer& img, TaskKind task) {
  switch (task) {
    case TaskKind::Blur: return blur_statistic(img);
    case TaskKind::Noise: return noise_statistic(img);
    case TaskKind::LowLight: return lowlight_statistic(img);
    case TaskKind::Haze: return haze_statistic(img);
    case TaskKind::Compression: return compression_statistic(img);
    default: break;
  }
  fail(ErrorKind::unsupported, "no heuristic scorer for task " + std::string(task_name(task)));
}

/// Piecewise-linear map from a raw statistic to a score, knots sorted by raw
/// value; values outside the knot span take the end scores.
struct ScoreCalibration {
  std::vector<std::pair<double, double>> knots;  // (raw, score)

  double operator()(double raw) const {
    require(knots.size() >= 2, ErrorKind::config, "score calibration needs two knots");
    if (!(raw > knots.front().first)) return knots.front().second;
    if (raw >= knots.back().first) return knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (raw < knots[i].first) {
        const auto [r0, s0] = knots[i - 1];
        const auto [r1, s1] = knots[i];
        return s0 + (raw - r0) / (r1 - r0) * (s1 - s0);
      }
    return knots.back().second;
  }
};

/// Frozen calibration, fitted on the procedural calibration corpus by
/// fit_calibration() (see metrics/calibration.hpp).
inline const ScoreCalibration& heuristic_calibration(TaskKind task) {
  static const std::array<ScoreCalibration, 9> table = [] {
    std::array<ScoreCalibration, 9> t{};
    t[task_index(TaskKind::Blur)] = {{{-15.917162278858292, 1}, {-6.4210807254884141, 1.5}, {-6.0282760428457127, 4.5}, {-3.7833846282261741, 5}}};
    t[task_index(TaskKind::Noise)] = {{{6.443648660640854e-09, 5}, {6.1858985004062732e-07, 4.5}, {0.020145935297054995, 3.75}, {0.039228632008267948, 3}, {0.057715614957253997, 2.25}, {0.062283207847784572, 1.5}, {0.093403914342914715, 1}}};
    t[task_index(TaskKind::LowLight)] = {{{0.0086732809944070621, 1}, {0.037721981357886222, 1.5}, {0.044132802685174694, 2.25}, {0.08807591068899176, 3}, {0.16707647211093007, 3.75}, {0.25006376924295637, 4.5}, {0.50362738473261004, 5}}};
    t[task_index(TaskKind::Haze)] = {{{0.076483562699134922, 5}, {0.16494233393719071, 4.5}, {0.41081314224106791, 3.75}, {0.5785618543993678, 3}, {0.67382336272021348, 1.5}, {0.87658353310234816, 1}}};
    t[task_index(TaskKind::Compression)] = {{{0.90198013204271854, 5}, {1.0920263967756498, 4.5}, {1.3685690595882964, 3.75}, {1.6303781860114701, 3}, {2.0589678982581106, 2.25}, {2.7673045702942818, 1.5}, {7.4796353151503272, 1}}};
    return t;
  }();
  require(heuristic_supports(task), ErrorKind::unsupported,
          "no heuristic scorer for task " + std::string(task_name(task)));
  return table[task_index(task)];
}

/// Score in [1,5]; 5 is clean.
inline double heuristic_degradation_score(const ImageBuffer& img, TaskKind task) {
  require(heuristic_supports(task), ErrorKind::unsupported,
          "no heuristic scorer for task " + std::string(task_name(task)));
  return std::clamp(heuristic_calibration(task)(heuristic_statistic(img, task)), kMinScore, kMaxScore);
}

}  // namespace degbench
