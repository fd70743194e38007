#pragma once

// Outcome of a single pair-quality gate.

#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "degbench/core/error.hpp"

namespace degbench {

enum class FilterReason { ok, low_semantic_score, insufficient_delta, misaligned, watermarked, external_reject };

inline constexpr std::string_view reason_name(FilterReason r) noexcept {
  switch (r) {
    case FilterReason::ok: return "ok";
    case FilterReason::low_semantic_score: return "low_semantic_score";
    case FilterReason::insufficient_delta: return "insufficient_delta";
    case FilterReason::misaligned: return "misaligned";
    case FilterReason::watermarked: return "watermarked";
    case FilterReason::external_reject: return "external_reject";
  }
  return "unknown";
}

inline constexpr FilterReason kAllReasons[] = {FilterReason::ok,          FilterReason::low_semantic_score,
                                               FilterReason::insufficient_delta, FilterReason::misaligned,
                                               FilterReason::watermarked, FilterReason::external_reject};

inline FilterReason parse_reason(std::string_view s) {
  for (FilterReason r : kAllReasons)
    if (reason_name(r) == s) return r;
  fail(ErrorKind::format, "unknown filter reason '" + std::string(s) + "'");
}

struct FilterVerdict {
  bool pass = true;
  FilterReason reason = FilterReason::ok;
  std::map<std::string, double> measurements;

  static FilterVerdict accept(std::map<std::string, double> m = {}) { return {true, FilterReason::ok, std::move(m)}; }
  static FilterVerdict reject(FilterReason r, std::map<std::string, double> m = {}) {
    require(r != FilterReason::ok, ErrorKind::parameter, "a rejection needs a reason other than ok");
    return {false, r, std::move(m)};
  }
  /// Pass iff cond; the reason is used only on rejection.
  static FilterVerdict decide(bool cond, FilterReason r, std::map<std::string, double> m = {}) {
    return cond ? accept(std::move(m)) : reject(r, std::move(m));
  }
};

inline nlohmann::ordered_json verdict_measurements_json(const FilterVerdict& v) {
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& [k, x] : v.measurements) m[k] = x;
  return m;
}

}  // namespace degbench
