#pragma once

// Fitting of the heuristic score calibration on the procedural calibration
// corpus. The severity-0 spread maps onto [4.5, 5], the severity-1 spread onto
// [1, 1.5], and per-level medians fill in between.

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/parallel.hpp"
#include "degbench/core/scene.hpp"
#include "degbench/degradations/apply.hpp"
#include "degbench/metrics/heuristic.hpp"

namespace degbench {

struct CalibrationCorpus {
  int images = 16;
  int size = 256;
  std::uint64_t seed = 0xCA11B;
  std::vector<double> levels = {0.0, 0.25, 0.5, 0.75, 1.0};
};

/// raw[level][image] statistic values.
struct CalibrationSamples {
  TaskKind task = TaskKind::Blur;
  std::vector<double> levels;
  std::vector<std::vector<double>> raw;
};

inline ImageBuffer calibration_image(const CalibrationCorpus& c, int i) {
  return calibration_scene(c.seed + static_cast<std::uint64_t>(i), c.size, c.size);
}

inline CalibrationSamples sample_calibration(TaskKind task, const CalibrationCorpus& c = {}, int workers = 1) {
  require(heuristic_supports(task), ErrorKind::unsupported, "no heuristic scorer for " + std::string(task_name(task)));
  CalibrationSamples s{task, c.levels, std::vector<std::vector<double>>(c.levels.size(), std::vector<double>(c.images))};
  const SeverityMap map = default_severity_map();
  parallel_for(static_cast<std::size_t>(c.images), workers, [&](std::size_t i) {
    const ImageBuffer img = calibration_image(c, static_cast<int>(i));
    const Plane depth = calibration_depth(c.seed + i, c.size, c.size);
    ApplyContext ctx;
    ctx.depth = &depth;
    const SeedTree seed(c.seed, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(task_index(task))});
    for (std::size_t l = 0; l < c.levels.size(); ++l)
      s.raw[l][i] = heuristic_statistic(synthesize(img, task, c.levels[l], map, seed, ctx).image, task);
  });
  return s;
}

inline ScoreCalibration fit_calibration(const CalibrationSamples& s) {
  require(s.levels.size() >= 2 && s.levels.front() == 0.0 && s.levels.back() == 1.0, ErrorKind::config,
          "calibration levels must start at 0 and end at 1");
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  // Work in an orientation where larger raw values are cleaner.
  const double sign = median(s.raw.front()) > median(s.raw.back()) ? 1.0 : -1.0;
  auto oriented = [&](const std::vector<double>& v) {
    std::vector<double> o(v);
    for (double& x : o) x *= sign;
    std::sort(o.begin(), o.end());
    return o;
  };
  const auto clean = oriented(s.raw.front());
  const auto severe = oriented(s.raw.back());
  require(severe.back() < clean.front(), ErrorKind::config,
          "calibration corpus overlaps: severity 0 and 1 statistics are not separable for " +
              std::string(task_name(s.task)));
  constexpr double kCleanFloor = 4.5, kSevereCeil = 1.5, kMargin = 0.25;
  const double clean_top = clean.back() + kMargin * (clean.back() - clean.front());
  const double severe_bottom = severe.front() - kMargin * (severe.back() - severe.front());
  std::vector<std::pair<double, double>> knots = {{clean_top, kMaxScore}, {clean.front(), kCleanFloor}};
  // Walk from clean to severe, keeping medians that stay strictly ordered.
  for (std::size_t l = 1; l + 1 < s.levels.size(); ++l) {
    const double m = median(oriented(s.raw[l]));
    if (m < knots.back().first && m > severe.back())
      knots.push_back({m, kCleanFloor - (kCleanFloor - kSevereCeil) * s.levels[l]});
  }
  knots.push_back({severe.back(), kSevereCeil});
  knots.push_back({severe_bottom, kMinScore});
  for (auto& k : knots) k.first *= sign;
  std::sort(knots.begin(), knots.end());
  // Equal raw values can only arise from a degenerate spread; keep the map a function.
  knots.erase(std::unique(knots.begin(), knots.end(), [](auto& a, auto& b) { return a.first == b.first; }),
              knots.end());
  return {knots};
}

inline std::string calibration_to_string(const ScoreCalibration& c) {
  std::ostringstream out;
  out.precision(17);
  out << '{';
  for (std::size_t i = 0; i < c.knots.size(); ++i)
    out << (i ? ", " : "") << '{' << c.knots[i].first << ", " << c.knots[i].second << '}';
  out << '}';
  return out.str();
}

}  // namespace degbench
