#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "degbench/curriculum/schedule.hpp"

using namespace degbench;

namespace {

template <typename F>
ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::usage;
}

}  // namespace

TEST(Stages, DefaultsMatchHyperparameterTable) {
  const auto [s1, s2] = default_stages();
  EXPECT_EQ(s1.steps, 500);
  EXPECT_EQ(s1.warmup_steps, 100);
  EXPECT_DOUBLE_EQ(s1.base_lr, 1e-5);
  EXPECT_EQ(s1.lr_mode, LrMode::constant);
  EXPECT_EQ(s1.batch, 16);
  EXPECT_EQ(s1.mix_synth, 1);
  EXPECT_EQ(s1.mix_real, 0);
  EXPECT_EQ(s1.frozen_fraction, 0.0);
  EXPECT_EQ(s2.steps, 1500);
  EXPECT_EQ(s2.warmup_steps, 100);
  EXPECT_DOUBLE_EQ(s2.base_lr, 1e-5);
  EXPECT_EQ(s2.lr_mode, LrMode::cosine_to_zero);
  EXPECT_EQ(s2.batch, 32);
  EXPECT_EQ(s2.mix_synth, 2);
  EXPECT_EQ(s2.mix_real, 8);
  EXPECT_DOUBLE_EQ(s2.frozen_fraction, 0.25);
  EXPECT_DOUBLE_EQ(s2.weight_decay, 0.01);
  EXPECT_DOUBLE_EQ(s2.adam_beta2, 0.95);
  s1.validate();
  s2.validate();
}

TEST(Stages, ValidationRejectsBadConfigs) {
  auto s = default_stage(2);
  s.mix_synth = s.mix_real = 0;
  EXPECT_EQ(error_kind_of([&] { s.validate(); }), ErrorKind::config);
  s = default_stage(1);
  s.warmup_steps = 600;
  EXPECT_EQ(error_kind_of([&] { s.validate(); }), ErrorKind::config);
  EXPECT_EQ(error_kind_of([] { default_stage(3); }), ErrorKind::usage);
}

TEST(LearningRate, StageOneConstantAfterWarmup) {
  const auto s = default_stage(1);
  EXPECT_EQ(lr_at(s, 0), 0.0);
  EXPECT_DOUBLE_EQ(lr_at(s, 50), 5e-6);
  EXPECT_DOUBLE_EQ(lr_at(s, 100), 1e-5);
  EXPECT_DOUBLE_EQ(lr_at(s, 500), 1e-5);
}

TEST(LearningRate, StageTwoCosineToZero) {
  const auto s = default_stage(2);
  EXPECT_EQ(lr_at(s, 1500), 0.0);
  EXPECT_NEAR(lr_at(s, 800), 5e-6, 1e-12);
  EXPECT_DOUBLE_EQ(lr_at(s, 100), 1e-5);
  // Closed form at a quarter of the decay: 0.5 (1 + cos(pi/4)).
  EXPECT_NEAR(lr_at(s, 450), 1e-5 * 0.5 * (1 + std::sqrt(0.5)), 1e-18);
}

TEST(LearningRate, ContinuousAtWarmupBoundary) {
  for (const auto& s : {default_stage(1), default_stage(2)}) {
    const double left = lr_at(s, s.warmup_steps - 1) + s.base_lr / s.warmup_steps;
    EXPECT_NEAR(left, lr_at(s, s.warmup_steps), 1e-18);
    EXPECT_DOUBLE_EQ(lr_at(s, s.warmup_steps), s.base_lr);
  }
}

TEST(LearningRate, CosineNonIncreasingAfterWarmup) {
  const auto s = default_stage(2);
  for (int step = s.warmup_steps; step < s.steps; ++step) EXPECT_LE(lr_at(s, step + 1), lr_at(s, step));
}

TEST(LearningRate, OutOfRangeStepRejected) {
  const auto s = default_stage(1);
  EXPECT_EQ(error_kind_of([&] { lr_at(s, -1); }), ErrorKind::parameter);
  EXPECT_EQ(error_kind_of([&] { lr_at(s, 501); }), ErrorKind::parameter);
}

TEST(LearningRate, CsvHasOneRowPerStep) {
  const auto csv = lr_csv(default_stage(2));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,lr");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const int step = std::stoi(line.substr(0, comma));
    EXPECT_EQ(std::stod(line.substr(comma + 1)), lr_at(default_stage(2), step));
    ++rows;
  }
  EXPECT_EQ(rows, 1501);
}

TEST(TaskSampling, UniformWithinBand) {
  const auto tasks = task_sample(123, 9000);
  std::map<TaskKind, int> counts;
  for (TaskKind t : tasks) ++counts[t];
  ASSERT_EQ(counts.size(), 9u);
  for (const auto& [t, c] : counts) EXPECT_NEAR(c / 9000.0, 1.0 / 9.0, 0.015) << task_name(t);
}

TEST(TaskSampling, DeterministicAndCounted) {
  EXPECT_EQ(task_sample(5, 200), task_sample(5, 200));
  EXPECT_NE(task_sample(5, 200), task_sample(6, 200));
  EXPECT_EQ(task_sample(5, 1).size(), 1u);
  EXPECT_EQ(error_kind_of([] { task_sample(5, 0); }), ErrorKind::parameter);
}

TEST(MixSampling, StageOneIsAllSynthetic) {
  for (Origin o : mix_sample(default_stage(1), 9, 5000)) EXPECT_EQ(o, Origin::synthetic);
}

TEST(MixSampling, StageTwoRealFraction) {
  const auto log = mix_sample(default_stage(2), 17, 10000);
  double real = 0;
  for (Origin o : log) real += o == Origin::real;
  EXPECT_NEAR(real / 10000.0, 0.8, 0.015);
  EXPECT_EQ(log, mix_sample(default_stage(2), 17, 10000));
}

TEST(MixSampling, RampMovesShareFromPreviousStage) {
  const auto s = default_stage(2);
  EXPECT_DOUBLE_EQ(synthetic_share_at(s, 0, 11, true, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(synthetic_share_at(s, 10, 11, true, 1.0), 0.2);
  EXPECT_DOUBLE_EQ(synthetic_share_at(s, 5, 11, true, 1.0), 0.6);
  EXPECT_DOUBLE_EQ(synthetic_share_at(s, 5, 11, false, 1.0), 0.2);
  const auto log = mix_sample(s, 3, 20000, {true, 1.0});
  double synth_first = 0, synth_last = 0;
  for (std::size_t i = 0; i < 2000; ++i) synth_first += log[i] == Origin::synthetic;
  for (std::size_t i = 18000; i < 20000; ++i) synth_last += log[i] == Origin::synthetic;
  EXPECT_GT(synth_first / 2000, 0.9);
  EXPECT_LT(synth_last / 2000, 0.3);
}

TEST(DrawLogs, IdenticalAcrossWorkerCounts) {
  const auto s = default_stage(2);
  const auto serial = draw_log(s, 44, 3000, {}, 1);
  const auto parallel = draw_log(s, 44, 3000, {}, 4);
  EXPECT_EQ(draw_log_jsonl(serial), draw_log_jsonl(parallel));
  EXPECT_EQ(serial.size(), 3000u);
}

TEST(DrawLogs, JsonLinesShape) {
  const auto text = draw_log_jsonl(draw_log(default_stage(1), 1, 3));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(first["draw"], 0);
  EXPECT_EQ(first["origin"], "synthetic");
  EXPECT_NO_THROW(parse_task(first["task"].get<std::string>()));
}
