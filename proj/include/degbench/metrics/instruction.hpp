#pragma once

// Evaluator instruction template. The same text ships as
// assets/degradation_instruction.txt; {task} is replaced by the task's display
// name.

#include <string>
#include <string_view>

#include "degbench/core/task.hpp"

namespace degbench {

inline constexpr std::string_view kInstructionVersion = "degradation-instruction-v1";
inline constexpr std::string_view kInstructionPlaceholder = "{task}";

inline constexpr std::string_view kDegradationInstruction = R"TXT(Degradation Evaluation: You will evaluate whether an image exhibits the degradation type {task} and determine its severity level. The assessment should focus exclusively on the specified degradation type, while ignoring unrelated image-quality issues, semantic content, and aesthetic preference. Your goal is to provide a consistent and objective judgment of how strongly the target degradation affects the image.

Evaluation Procedure:
1. Divide the image into several local regions (e.g., a 3x3 grid) to ensure a systematic inspection.
2. Examine each region carefully and identify whether the degradation type {task} is present.
3. Estimate both the severity of the degradation and the proportion of the image area that is affected.
4. Summarize the regional observations into a single overall score that best reflects the image-level degradation.
5. If the degradation is spatially uneven, place greater emphasis on the regions that are more strongly affected.
6. For borderline cases, choose the nearest score level based on the dominant visual impression.
7. Do not output any intermediate reasoning, explanation, or analysis.

Scoring Scale (1--5): Use the following scale to measure the severity of the target degradation. Higher scores indicate cleaner images with less visible degradation, while lower scores indicate stronger and more widespread corruption.
- 5 = No {task}; the image is essentially clean with no noticeable degradation.
- 4 = Mild degradation; only a small portion of the image is affected (<= 20% area), and the overall visual quality remains largely intact.
- 3 = Moderate degradation; the degradation is clearly visible and affects a noticeable part of the image (20--50% area).
- 2 = Severe degradation; the corruption is strong and influences a large portion of the image (50--80% area).
- 1 = Extreme degradation; the degradation dominates most of the image (> 80% area) and seriously harms visual quality.

Output Format:
Return only in the format ``Degradation Score: <1--5>''
)TXT";

inline std::string render_instruction(std::string_view tmpl, TaskKind task) {
  std::string out;
  const std::string_view name = task_display_name(task);
  std::size_t pos = 0;
  for (std::size_t hit; (hit = tmpl.find(kInstructionPlaceholder, pos)) != std::string_view::npos;
       pos = hit + kInstructionPlaceholder.size()) {
    out.append(tmpl.substr(pos, hit - pos));
    out.append(name);
  }
  out.append(tmpl.substr(pos));
  return out;
}

inline std::string render_scoring_instruction(TaskKind task) { return render_instruction(kDegradationInstruction, task); }

/// Per-task restoration instructions given to the evaluated methods. These are
/// placeholders, not the benchmark's fixed prompts.
struct BenchmarkPrompt {
  TaskKind task;
  std::string_view text;
};

inline constexpr bool kBenchmarkPromptsCanonical = false;

inline constexpr BenchmarkPrompt kBenchmarkPrompts[] = {
    {TaskKind::Blur, "Remove the blur from this image and restore sharp details. Keep all content unchanged."},
    {TaskKind::Compression, "Remove the compression artifacts from this image. Keep all content unchanged."},
    {TaskKind::Moire, "Remove the moire patterns from this image. Keep all content unchanged."},
    {TaskKind::LowLight, "Brighten this low-light image with natural exposure. Keep all content unchanged."},
    {TaskKind::Noise, "Remove the noise from this image while preserving fine details. Keep all content unchanged."},
    {TaskKind::Flare, "Remove the lens flare from this image. Keep all content unchanged."},
    {TaskKind::Reflection, "Remove the reflections from this image. Keep all content unchanged."},
    {TaskKind::Haze, "Remove the haze from this image and restore clear contrast. Keep all content unchanged."},
    {TaskKind::Rain, "Remove the rain streaks and raindrops from this image. Keep all content unchanged."},
};

inline std::string_view benchmark_prompt(TaskKind task) {
  for (const auto& p : kBenchmarkPrompts)
    if (p.task == task) return p.text;
  return {};
}

}  // namespace degbench
