#pragma once

// Gate on the drop in degradation score from the clean to the degraded image.

#include <cmath>

#include "degbench/filtering/verdict.hpp"
#include "degbench/metrics/scores.hpp"

namespace degbench {

inline constexpr double kDefaultMinDelta = 1.0;

/// Pass iff clean >= degraded and clean - degraded >= min_delta.
inline FilterVerdict degradation_delta_filter(double clean_score, double degraded_score,
                                              double min_delta = kDefaultMinDelta) {
  auto in_range = [](double s) { return s >= kMinScore && s <= kMaxScore; };
  require(in_range(clean_score) && in_range(degraded_score), ErrorKind::parameter, "scores must lie in [1,5]");
  require(min_delta >= 0.0 && std::isfinite(min_delta), ErrorKind::parameter, "min_delta must be non-negative");
  const double delta = clean_score - degraded_score;
  return FilterVerdict::decide(
      clean_score >= degraded_score && delta >= min_delta, FilterReason::insufficient_delta,
      {{"clean_score", clean_score}, {"degraded_score", degraded_score}, {"delta", delta}});
}

}  // namespace degbench
