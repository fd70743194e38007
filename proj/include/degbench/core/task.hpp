#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "degbench/core/error.hpp"

namespace degbench {

enum class TaskKind { Blur, Compression, Moire, LowLight, Noise, Flare, Reflection, Haze, Rain };

inline constexpr std::array<TaskKind, 9> kAllTasks = {
    TaskKind::Blur,  TaskKind::Compression, TaskKind::Moire, TaskKind::LowLight, TaskKind::Noise,
    TaskKind::Flare, TaskKind::Reflection,  TaskKind::Haze,  TaskKind::Rain};

// Column order used by the benchmark tables.
inline constexpr std::array<TaskKind, 9> kTableOrder = {
    TaskKind::Rain,  TaskKind::Blur,  TaskKind::LowLight, TaskKind::Haze,       TaskKind::Reflection,
    TaskKind::Flare, TaskKind::Moire, TaskKind::Noise,    TaskKind::Compression};

inline constexpr std::size_t task_index(TaskKind t) noexcept { return static_cast<std::size_t>(t); }

/// snake_case identifier used in manifests, score files and directory names.
inline constexpr std::string_view task_name(TaskKind t) noexcept {
  switch (t) {
    case TaskKind::Blur: return "blur";
    case TaskKind::Compression: return "compression";
    case TaskKind::Moire: return "moire";
    case TaskKind::LowLight: return "low_light";
    case TaskKind::Noise: return "noise";
    case TaskKind::Flare: return "flare";
    case TaskKind::Reflection: return "reflection";
    case TaskKind::Haze: return "haze";
    case TaskKind::Rain: return "rain";
  }
  return "unknown";
}

/// Human-readable degradation name, as substituted into evaluator instructions.
inline constexpr std::string_view task_display_name(TaskKind t) noexcept {
  switch (t) {
    case TaskKind::Blur: return "blur";
    case TaskKind::Compression: return "compression artifacts";
    case TaskKind::Moire: return "moire patterns";
    case TaskKind::LowLight: return "low-light";
    case TaskKind::Noise: return "noise";
    case TaskKind::Flare: return "flare";
    case TaskKind::Reflection: return "reflection";
    case TaskKind::Haze: return "haze";
    case TaskKind::Rain: return "rain";
  }
  return "unknown";
}

inline TaskKind parse_task(std::string_view s) {
  for (TaskKind t : kAllTasks)
    if (task_name(t) == s) return t;
  if (s == "lowlight" || s == "low-light") return TaskKind::LowLight;
  if (s == "hazy") return TaskKind::Haze;
  fail(ErrorKind::format, "unknown task '" + std::string(s) + "'");
}

enum class Origin { synthetic, real };

inline constexpr std::string_view origin_name(Origin o) noexcept {
  return o == Origin::synthetic ? "synthetic" : "real";
}

inline Origin parse_origin(std::string_view s) {
  if (s == "synthetic") return Origin::synthetic;
  if (s == "real") return Origin::real;
  fail(ErrorKind::format, "unknown origin '" + std::string(s) + "'");
}

/// Normalized degradation strength: 0 is identity strength, 1 the strongest configured setting.
class Severity {
 public:
  constexpr Severity() = default;
  explicit Severity(double v) : value_(v) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, ErrorKind::parameter,
            "severity must lie in [0,1], got " + std::to_string(v));
  }
  constexpr double value() const noexcept { return value_; }
  friend constexpr bool operator==(Severity, Severity) = default;

 private:
  double value_ = 0.0;
};

}  // namespace degbench
