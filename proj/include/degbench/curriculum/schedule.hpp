#pragma once

// Two-stage training curriculum: stage settings, seeded task and data-origin
// sampling, and the per-step learning-rate schedule.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "degbench/core/error.hpp"
#include "degbench/core/parallel.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/core/task.hpp"

namespace degbench {

enum class LrMode { constant, cosine_to_zero };

inline constexpr std::string_view lr_mode_name(LrMode m) noexcept {
  return m == LrMode::constant ? "constant" : "cosine_to_zero";
}

struct StageConfig {
  std::string name;
  int steps = 0;
  int warmup_steps = 0;
  double base_lr = 0.0;
  LrMode lr_mode = LrMode::constant;
  int batch = 0;
  double mix_synth = 1.0;
  double mix_real = 0.0;
  double frozen_fraction = 0.0;  // reported only
  // Optimizer settings, recorded as metadata.
  double weight_decay = 0.0;
  double grad_clip = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.95;
  double adam_eps = 1e-8;

  void validate() const {
    require(steps > 0, ErrorKind::config, "stage needs a positive step count");
    require(warmup_steps >= 0 && warmup_steps <= steps, ErrorKind::config, "warmup must lie in [0, steps]");
    require(base_lr >= 0.0 && std::isfinite(base_lr), ErrorKind::config, "base learning rate must be non-negative");
    require(mix_synth >= 0.0 && mix_real >= 0.0 && mix_synth + mix_real > 0.0, ErrorKind::config,
            "mix weights must be non-negative and not both zero");
    require(frozen_fraction >= 0.0 && frozen_fraction <= 1.0, ErrorKind::config, "frozen fraction must lie in [0,1]");
  }

  double synthetic_share() const { return mix_synth / (mix_synth + mix_real); }
};

/// Transfer stage then supervised fine-tuning stage.
inline std::pair<StageConfig, StageConfig> default_stages() {
  StageConfig transfer;
  transfer.name = "transfer";
  transfer.steps = 500;
  transfer.warmup_steps = 100;
  transfer.base_lr = 1e-5;
  transfer.lr_mode = LrMode::constant;
  transfer.batch = 16;
  transfer.mix_synth = 1;
  transfer.mix_real = 0;
  transfer.frozen_fraction = 0.0;
  transfer.weight_decay = 0.0;

  StageConfig sft = transfer;
  sft.name = "sft";
  sft.steps = 1500;
  sft.lr_mode = LrMode::cosine_to_zero;
  sft.batch = 32;
  sft.mix_synth = 2;
  sft.mix_real = 8;
  sft.frozen_fraction = 0.25;
  sft.weight_decay = 0.01;
  return {transfer, sft};
}

/// Stage by 1-based index.
inline StageConfig default_stage(int index) {
  require(index == 1 || index == 2, ErrorKind::usage, "stage must be 1 or 2");
  const auto [a, b] = default_stages();
  return index == 1 ? a : b;
}

inline nlohmann::ordered_json stage_to_json(const StageConfig& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["steps"] = s.steps;
  j["warmup_steps"] = s.warmup_steps;
  j["base_lr"] = s.base_lr;
  j["lr_mode"] = lr_mode_name(s.lr_mode);
  j["batch"] = s.batch;
  j["mix"] = {s.mix_synth, s.mix_real};
  j["frozen_fraction"] = s.frozen_fraction;
  j["weight_decay"] = s.weight_decay;
  j["grad_clip"] = s.grad_clip;
  j["adamw"] = {{"beta1", s.adam_beta1}, {"beta2", s.adam_beta2}, {"eps", s.adam_eps}};
  return j;
}

/// Linear warmup from 0, then constant or cosine decay reaching 0 at the last step.
inline double lr_at(const StageConfig& s, int step) {
  require(step >= 0 && step <= s.steps, ErrorKind::parameter,
          "step " + std::to_string(step) + " outside [0, " + std::to_string(s.steps) + "]");
  if (step < s.warmup_steps) return s.base_lr * step / s.warmup_steps;
  if (s.lr_mode == LrMode::constant || s.steps == s.warmup_steps) return s.base_lr;
  const double t = static_cast<double>(step - s.warmup_steps) / (s.steps - s.warmup_steps);
  return s.base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

/// "step,lr" rows for every step 0..steps, shortest round-trip formatting.
inline std::string lr_csv(const StageConfig& s) {
  std::string out = "step,lr\n";
  char buf[64];
  for (int step = 0; step <= s.steps; ++step) {
    const auto r = std::to_chars(buf, buf + sizeof buf, lr_at(s, step));
    out += std::to_string(step) + "," + std::string(buf, r.ptr) + "\n";
  }
  return out;
}

struct Draw {
  TaskKind task = TaskKind::Blur;
  Origin origin = Origin::synthetic;
};

using DrawLog = std::vector<Draw>;

// Draw i uses SeedTree(seed, {i}): child 0 for the task, child 1 for the origin,
// so logs do not depend on how draws are spread over workers.

inline TaskKind sample_task(std::uint64_t seed, std::uint32_t i) {
  Rng rng = SeedTree(seed, {i}).child(0).rng();
  return kAllTasks[rng.below(kAllTasks.size())];
}

/// Synthetic share for draw i of n. With ramp, the share moves linearly from
/// `ramp_from` at the first draw to the stage ratio at the last.
inline double synthetic_share_at(const StageConfig& s, std::size_t i, std::size_t n, bool ramp, double ramp_from) {
  const double target = s.synthetic_share();
  if (!ramp || n < 2) return target;
  const double t = static_cast<double>(i) / static_cast<double>(n - 1);
  return ramp_from + (target - ramp_from) * t;
}

inline Origin sample_origin(std::uint64_t seed, std::uint32_t i, double p_synthetic) {
  Rng rng = SeedTree(seed, {i}).child(1).rng();
  return rng.bernoulli(p_synthetic) ? Origin::synthetic : Origin::real;
}

inline std::vector<TaskKind> task_sample(std::uint64_t seed, std::size_t n, std::size_t workers = 1) {
  require(n >= 1, ErrorKind::parameter, "need at least one draw");
  std::vector<TaskKind> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = sample_task(seed, static_cast<std::uint32_t>(i)); });
  return out;
}

struct MixOptions {
  bool ramp = false;
  double ramp_from = 1.0;  // share of the previous stage (1:0)
};

inline std::vector<Origin> mix_sample(const StageConfig& s, std::uint64_t seed, std::size_t n, MixOptions opt = {},
                                      std::size_t workers = 1) {
  s.validate();
  require(n >= 1, ErrorKind::parameter, "need at least one draw");
  require(opt.ramp_from >= 0.0 && opt.ramp_from <= 1.0, ErrorKind::parameter, "ramp start share must lie in [0,1]");
  std::vector<Origin> out(n);
  parallel_for(n, workers, [&](std::size_t i) {
    out[i] = sample_origin(seed, static_cast<std::uint32_t>(i), synthetic_share_at(s, i, n, opt.ramp, opt.ramp_from));
  });
  return out;
}

inline DrawLog draw_log(const StageConfig& s, std::uint64_t seed, std::size_t n, MixOptions opt = {},
                        std::size_t workers = 1) {
  const auto tasks = task_sample(seed, n, workers);
  const auto origins = mix_sample(s, seed, n, opt, workers);
  DrawLog log(n);
  for (std::size_t i = 0; i < n; ++i) log[i] = {tasks[i], origins[i]};
  return log;
}

inline std::string draw_log_jsonl(const DrawLog& log) {
  std::string out;
  for (std::size_t i = 0; i < log.size(); ++i) {
    nlohmann::ordered_json j;
    j["draw"] = i;
    j["task"] = task_name(log[i].task);
    j["origin"] = origin_name(log[i].origin);
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace degbench
