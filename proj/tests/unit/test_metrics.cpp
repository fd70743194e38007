#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "degbench/core/scene.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/degradations/apply.hpp"
#include "degbench/metrics/backends.hpp"
#include "degbench/metrics/calibration.hpp"
#include "degbench/metrics/correlation.hpp"
#include "degbench/metrics/heuristic.hpp"
#include "degbench/metrics/instruction.hpp"
#include "degbench/metrics/scores.hpp"
#include "published_tables.hpp"
#include "test_util.hpp"

using namespace degbench;
using testutil::constant_image;
using testutil::kPublishedRows;
using testutil::random_image;

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

MethodBoard board_from_row(const testutil::PublishedRow& row) {
  std::vector<TaskReport> reports;
  for (std::size_t i = 0; i < kTableOrder.size(); ++i)
    reports.push_back(make_task_report(kTableOrder[i], 1, row.tasks[i].lps, row.tasks[i].rs));
  return compose_board(std::string(row.method), reports);
}

const testutil::PublishedRow& row_named(std::string_view name) {
  for (const auto& r : kPublishedRows)
    if (r.method == name) return r;
  throw std::runtime_error("missing row");
}

// Tie-corrected Kendall tau-b by enumerating all pairs.
double brute_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double conc = 0, disc = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) tx += 1;
      else if (dy == 0) ty += 1;
      else if (dx * dy > 0) conc += 1;
      else disc += 1;
    }
  return (conc - disc) / std::sqrt((conc + disc + tx) * (conc + disc + ty));
}

// Spearman through the textbook definition: ranks by counting, then Pearson.
double brute_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) less += w < v[i], equal += w == v[i];
      r[i] = less + (equal + 1) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i] / n, my += ry[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

class FixedScorer final : public ScorerBackend {
 public:
  FixedScorer(double deg, double restored) : deg_(deg), restored_(restored) {}
  std::string_view name() const override { return "fixed"; }
  bool supports(TaskKind) const override { return true; }
  double score(const ImageBuffer&, std::string_view id, TaskKind) const override {
    return id == "restored" ? restored_ : deg_;
  }

 private:
  double deg_, restored_;
};

}  // namespace

// ---------------------------------------------------------------- final score

TEST(FinalScore, PublishedAnchors) {
  EXPECT_NEAR(final_score(0.429, 2.063), 0.236, 0.0005);
  EXPECT_NEAR(final_score(0.468, 2.320), 0.247, 0.0005);
  EXPECT_NEAR(final_score(0.445, 1.312), 0.146, 0.0005);
}

TEST(FinalScore, ZeroImprovementGivesZero) {
  for (double lps : {0.0, 0.3, 0.77, 1.0}) EXPECT_EQ(final_score(lps, 0.0), 0.0);
}

TEST(FinalScore, LpsOutsideUnitIntervalRejected) {
  EXPECT_EQ(error_kind_of([] { final_score(-0.01, 1.0); }), ErrorKind::parameter);
  EXPECT_EQ(error_kind_of([] { final_score(1.01, 1.0); }), ErrorKind::parameter);
}

TEST(FinalScore, SignAndMonotonicity) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double lps = rng.uniform(0.0, 0.999), rs = rng.uniform(-4.0, 4.0);
    const double fs = final_score(lps, rs);
    EXPECT_EQ(fs > 0, rs > 0);
    EXPECT_EQ(fs < 0, rs < 0);
    EXPECT_LT(fs, final_score(lps, rs + 0.01));
    if (rs > 0) {
      EXPECT_GT(fs, final_score(std::min(1.0, lps + 0.001), rs));
    }
  }
  EXPECT_EQ(final_score(1.0, 3.0), 0.0);
}

TEST(FinalScore, EveryPublishedCellMatches) {
  for (const auto& row : kPublishedRows)
    for (std::size_t i = 0; i < row.tasks.size(); ++i) {
      const auto& c = row.tasks[i];
      EXPECT_NEAR(final_score(c.lps, c.rs), c.fs, 0.0015) << row.method << " " << task_name(kTableOrder[i]);
    }
}

// ---------------------------------------------------------------- aggregation

TEST(Aggregate, NanoBananaProOverallRow) {
  const auto b = board_from_row(row_named("Nano Banana Pro"));
  EXPECT_EQ(b.overall.tasks, 9u);
  EXPECT_NEAR(b.overall.mean_lps, 0.413, 0.001);
  EXPECT_NEAR(b.overall.mean_rs, 1.306, 0.001);
  EXPECT_NEAR(b.overall.fs, 0.153, 0.001);
}

TEST(Aggregate, CandidateOverallRow) {
  const auto b = board_from_row(row_named("Candidate"));
  EXPECT_NEAR(b.overall.mean_lps, 0.445, 0.001);
  EXPECT_NEAR(b.overall.mean_rs, 1.312, 0.001);
  EXPECT_NEAR(b.overall.fs, 0.146, 0.001);
}

TEST(Aggregate, EveryPublishedOverallRowMatches) {
  for (const auto& row : kPublishedRows) {
    const auto b = board_from_row(row);
    EXPECT_NEAR(b.overall.mean_lps, row.overall.lps, 0.001) << row.method;
    EXPECT_NEAR(b.overall.mean_rs, row.overall.rs, 0.001) << row.method;
    EXPECT_NEAR(b.overall.fs, row.overall.fs, 0.001) << row.method;
  }
}

TEST(Aggregate, MeanOfTaskFsDoesNotReproduceOverall) {
  const auto& row = row_named("Nano Banana Pro");
  double mean_fs = 0;
  for (const auto& c : row.tasks) mean_fs += c.fs / 9.0;
  EXPECT_NE(format_half_even(mean_fs), format_half_even(row.overall.fs));
  EXPECT_EQ(format_half_even(board_from_row(row).overall.fs), format_half_even(row.overall.fs));
}

TEST(Aggregate, SingleRecordOverallEqualsRecord) {
  const auto r = make_eval_record("a", TaskKind::Haze, 2.0, 4.5, 0.3);
  const auto b = aggregate({r});
  EXPECT_EQ(b.overall.tasks, 1u);
  EXPECT_DOUBLE_EQ(b.overall.mean_lps, 0.3);
  EXPECT_DOUBLE_EQ(b.overall.mean_rs, 2.5);
  EXPECT_DOUBLE_EQ(b.overall.fs, r.fs);
  EXPECT_EQ(b.warnings.size(), 8u);
}

TEST(Aggregate, PerTaskMeansThenComposition) {
  std::vector<EvalRecord> recs = {make_eval_record("a", TaskKind::Blur, 1, 3, 0.2),
                                  make_eval_record("b", TaskKind::Blur, 2, 3, 0.4),
                                  make_eval_record("c", TaskKind::Noise, 2, 5, 0.1)};
  const auto b = aggregate(recs);
  ASSERT_EQ(b.tasks.size(), 2u);
  const auto& blur = b.tasks[0].task == TaskKind::Blur ? b.tasks[0] : b.tasks[1];
  EXPECT_NEAR(blur.mean_lps, 0.3, 1e-12);
  EXPECT_NEAR(blur.mean_rs, 1.5, 1e-12);
  EXPECT_NEAR(blur.fs, 0.2 * 0.7 * 1.5, 1e-12);
  EXPECT_NEAR(b.overall.mean_lps, 0.2, 1e-12);
  EXPECT_NEAR(b.overall.mean_rs, 2.25, 1e-12);
}

TEST(Aggregate, EmptyInputRejected) {
  EXPECT_EQ(error_kind_of([] { aggregate({}); }), ErrorKind::parameter);
}

TEST(Aggregate, TasksFollowTableOrder) {
  const auto b = board_from_row(kPublishedRows[0]);
  ASSERT_EQ(b.tasks.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(b.tasks[i].task, kTableOrder[i]);
}

// ---------------------------------------------------------------- rounding and emission

TEST(HalfEven, TiesGoToEvenDigit) {
  EXPECT_EQ(format_half_even(0.2365), "0.236");
  EXPECT_EQ(format_half_even(0.2375), "0.238");
  EXPECT_EQ(format_half_even(0.23650001), "0.237");
  EXPECT_EQ(format_half_even(2.5, 0), "2");
  EXPECT_EQ(format_half_even(3.5, 0), "4");
  EXPECT_EQ(format_half_even(0.9995), "1.000");
  EXPECT_EQ(format_half_even(-0.0004), "0.000");
  EXPECT_EQ(format_half_even(-1.2345), "-1.234");
  EXPECT_EQ(format_half_even(7.0), "7.000");
  EXPECT_DOUBLE_EQ(round_half_even(0.1525), 0.152);
}

TEST(Leaderboard, CsvSingleCell) {
  Leaderboard board{{compose_board("m", {make_task_report(TaskKind::Rain, 1, 0.429, 2.063)})}};
  const auto csv = emit_leaderboard(board, BoardFormat::csv);
  EXPECT_NE(csv.find("m,rain,0.429,2.063,0.236\n"), std::string::npos);
  EXPECT_NE(csv.find("m,avg_total,0.429,2.063,0.236\n"), std::string::npos);
  EXPECT_EQ(csv.rfind("method,task,lps,rs,fs\n", 0), 0u);
}

TEST(Leaderboard, EmptyBoardIsHeaderOnly) {
  const auto csv = emit_leaderboard({}, BoardFormat::csv);
  EXPECT_EQ(csv, "method,task,lps,rs,fs\n");
  const auto md = emit_leaderboard({}, BoardFormat::markdown);
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 2);
}

TEST(Leaderboard, MarkdownIsWellFormedPipeTable) {
  Leaderboard board;
  for (const auto& row : kPublishedRows) board.methods.push_back(board_from_row(row));
  board.methods.push_back(compose_board("partial|name", {make_task_report(TaskKind::Noise, 3, 0.2, 1.0)}));
  const auto md = emit_leaderboard(board, BoardFormat::markdown);
  std::vector<std::string> lines;
  for (std::size_t p = 0, q; (q = md.find('\n', p)) != std::string::npos; p = q + 1) lines.push_back(md.substr(p, q - p));
  ASSERT_EQ(lines.size(), 2 + board.methods.size());
  auto cells = [](const std::string& l) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < l.size(); ++i)
      if (l[i] == '|' && (i == 0 || l[i - 1] != '\\')) ++n;
    return n;
  };
  for (const auto& l : lines) {
    EXPECT_EQ(l.front(), '|');
    EXPECT_EQ(l.back(), '|');
    EXPECT_EQ(cells(l), 1 + 1 + 30u) << l;
  }
  EXPECT_NE(lines[2].find("| 0.429 | 2.063 | 0.236 |"), std::string::npos);
  EXPECT_NE(lines.back().find(" - | - | - |"), std::string::npos);
}

TEST(Leaderboard, FormatParsing) {
  EXPECT_EQ(parse_board_format("csv"), BoardFormat::csv);
  EXPECT_EQ(parse_board_format("markdown"), BoardFormat::markdown);
  EXPECT_EQ(error_kind_of([] { parse_board_format("xml"); }), ErrorKind::usage);
}

// ---------------------------------------------------------------- correlation

TEST(Correlation, PerfectAgreementAndReversal) {
  const std::vector<double> x = {1, 2, 3}, y = {1, 2, 3}, z = {3, 2, 1};
  const auto a = rank_correlations(x, y);
  EXPECT_DOUBLE_EQ(a.kendall_tau_b, 1.0);
  EXPECT_DOUBLE_EQ(a.srcc, 1.0);
  EXPECT_DOUBLE_EQ(a.plcc, 1.0);
  const auto b = rank_correlations(x, z);
  EXPECT_DOUBLE_EQ(b.kendall_tau_b, -1.0);
  EXPECT_DOUBLE_EQ(b.srcc, -1.0);
  EXPECT_DOUBLE_EQ(b.plcc, -1.0);
}

TEST(Correlation, TiedExampleMatchesPairEnumeration) {
  const std::vector<double> x = {1, 1, 2, 3}, y = {1, 2, 2, 3};
  EXPECT_NEAR(kendall_tau_b(x, y), brute_tau_b(x, y), 1e-15);
  EXPECT_NEAR(kendall_tau_b(x, y), 4.0 / 5.0, 1e-15);
}

TEST(Correlation, RandomSmallSamplesMatchOracles) {
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(4));
      y[i] = static_cast<double>(rng.below(4));
    }
    const bool flat_x = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const bool flat_y = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (flat_x || flat_y) {
      EXPECT_EQ(error_kind_of([&] { kendall_tau_b(x, y); }), ErrorKind::undefined);
      EXPECT_EQ(error_kind_of([&] { spearman(x, y); }), ErrorKind::undefined);
      continue;
    }
    EXPECT_NEAR(kendall_tau_b(x, y), brute_tau_b(x, y), 1e-12);
    EXPECT_NEAR(spearman(x, y), brute_spearman(x, y), 1e-12);
  }
}

TEST(Correlation, LargeSampleKendallMatchesEnumeration) {
  Rng rng(5);
  std::vector<double> x(400), y(400);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(rng.below(30));
    y[i] = x[i] + static_cast<double>(rng.below(20));
  }
  EXPECT_NEAR(kendall_tau_b(x, y), brute_tau_b(x, y), 1e-12);
}

TEST(Correlation, InputValidation) {
  const std::vector<double> a = {1, 2}, b = {1, 2, 3}, one = {1};
  EXPECT_EQ(error_kind_of([&] { pearson(a, b); }), ErrorKind::parameter);
  EXPECT_EQ(error_kind_of([&] { pearson(one, one); }), ErrorKind::parameter);
}

// ---------------------------------------------------------------- instruction

TEST(Instruction, EmbeddedCopyMatchesShippedAsset) {
  const auto asset = testutil::read_text(std::filesystem::path(DEGBENCH_ASSET_DIR) / "degradation_instruction.txt");
  EXPECT_EQ(asset, std::string(kDegradationInstruction));
}

TEST(Instruction, HazeRenderingCarriesScaleAnchors) {
  const auto text = render_scoring_instruction(TaskKind::Haze);
  EXPECT_NE(text.find("5 = No haze; the image is essentially clean"), std::string::npos);
  for (const char* marker : {"<= 20% area", "20--50% area", "50--80% area", "> 80% area"})
    EXPECT_NE(text.find(marker), std::string::npos) << marker;
  const std::string closing = "Return only in the format ``Degradation Score: <1--5>''\n";
  ASSERT_GE(text.size(), closing.size());
  EXPECT_EQ(text.substr(text.size() - closing.size()), closing);
  EXPECT_EQ(text.find("{task}"), std::string::npos);
}

TEST(Instruction, RenderingIsDeterministicPerTask) {
  for (TaskKind t : kTableOrder) {
    EXPECT_EQ(render_scoring_instruction(t), render_scoring_instruction(t));
    EXPECT_NE(render_scoring_instruction(t).find(std::string(task_display_name(t))), std::string::npos);
  }
}

TEST(Instruction, BenchmarkPromptsCoverEveryTask) {
  for (TaskKind t : kTableOrder) EXPECT_FALSE(benchmark_prompt(t).empty());
}

// ---------------------------------------------------------------- heuristic scores

TEST(Heuristic, UnsupportedTasksRejected) {
  const auto img = constant_image(32, 32, 3, 0.5f);
  for (TaskKind t : {TaskKind::Flare, TaskKind::Moire, TaskKind::Reflection, TaskKind::Rain})
    EXPECT_EQ(error_kind_of([&] { heuristic_degradation_score(img, t); }), ErrorKind::unsupported);
}

TEST(Heuristic, LowLightCalibrationContract) {
  const CalibrationCorpus corpus;
  const auto clean = calibration_image(corpus, 0);
  EXPECT_GE(heuristic_degradation_score(clean, TaskKind::LowLight), 4.5);
  const auto dark = synthesize(clean, TaskKind::LowLight, 1.0, default_severity_map(), SeedTree(3, {})).image;
  EXPECT_LE(heuristic_degradation_score(dark, TaskKind::LowLight), 1.5);
}

TEST(Heuristic, FrozenCalibrationEqualsRefit) {
  for (TaskKind t : {TaskKind::Blur, TaskKind::Noise, TaskKind::LowLight, TaskKind::Haze, TaskKind::Compression}) {
    const auto fitted = fit_calibration(sample_calibration(t));
    const auto& frozen = heuristic_calibration(t);
    ASSERT_EQ(fitted.knots.size(), frozen.knots.size()) << task_name(t);
    for (std::size_t i = 0; i < fitted.knots.size(); ++i) {
      EXPECT_NEAR(fitted.knots[i].first, frozen.knots[i].first, 1e-12 * (1 + std::fabs(frozen.knots[i].first)))
          << task_name(t) << " knot " << i;
      EXPECT_EQ(fitted.knots[i].second, frozen.knots[i].second) << task_name(t) << " knot " << i;
    }
  }
}

TEST(Heuristic, CorpusContractHoldsForEveryImage) {
  for (TaskKind t : {TaskKind::Blur, TaskKind::Noise, TaskKind::LowLight, TaskKind::Haze, TaskKind::Compression}) {
    const auto s = sample_calibration(t);
    const auto& cal = heuristic_calibration(t);
    for (double raw : s.raw.front()) EXPECT_GE(std::clamp(cal(raw), kMinScore, kMaxScore), 4.5) << task_name(t);
    for (double raw : s.raw.back()) EXPECT_LE(std::clamp(cal(raw), kMinScore, kMaxScore), 1.5) << task_name(t);
  }
}

TEST(Heuristic, ScoresFallWithSeverity) {
  const SeverityMap map = default_severity_map();
  for (TaskKind t : {TaskKind::Blur, TaskKind::Noise, TaskKind::LowLight, TaskKind::Haze, TaskKind::Compression}) {
    for (std::uint64_t i = 0; i < 3; ++i) {
      const auto img = calibration_scene(7700 + i, 128, 128);
      const auto depth = calibration_depth(7700 + i, 128, 128);
      ApplyContext ctx;
      ctx.depth = &depth;
      const SeedTree seed(19, {static_cast<std::uint32_t>(i)});
      std::vector<double> levels, scores;
      for (int k = 0; k < 10; ++k) {
        levels.push_back(k / 9.0);
        scores.push_back(heuristic_degradation_score(synthesize(img, t, k / 9.0, map, seed, ctx).image, t));
      }
      EXPECT_LE(spearman(levels, scores), -0.9) << task_name(t) << " image " << i;
    }
  }
}

TEST(Heuristic, ScoresStayInRange) {
  for (TaskKind t : {TaskKind::Blur, TaskKind::Noise, TaskKind::LowLight, TaskKind::Haze, TaskKind::Compression}) {
    for (float v : {0.0f, 1.0f}) {
      const double s = heuristic_degradation_score(constant_image(32, 32, 3, v), t);
      EXPECT_GE(s, kMinScore);
      EXPECT_LE(s, kMaxScore);
    }
  }
}

TEST(Heuristic, CalibrationInterpolatesAndClamps) {
  const ScoreCalibration cal{{{0.0, 5.0}, {1.0, 3.0}, {3.0, 1.0}}};
  EXPECT_DOUBLE_EQ(cal(-1.0), 5.0);
  EXPECT_DOUBLE_EQ(cal(0.5), 4.0);
  EXPECT_DOUBLE_EQ(cal(2.0), 2.0);
  EXPECT_DOUBLE_EQ(cal(9.0), 1.0);
}

TEST(Heuristic, FitRejectsOverlappingCorpus) {
  CalibrationSamples s{TaskKind::Blur, {0.0, 1.0}, {{1.0, 2.0}, {1.5, 0.5}}};
  EXPECT_EQ(error_kind_of([&] { fit_calibration(s); }), ErrorKind::config);
}

// ---------------------------------------------------------------- scorer backends

TEST(Scorer, RestorationScoreArithmetic) {
  const auto img = constant_image(8, 8, 3, 0.5f);
  EXPECT_DOUBLE_EQ(restoration_score(img, "degraded", img, "restored", TaskKind::Rain, FixedScorer(2, 5)), 3.0);
  EXPECT_DOUBLE_EQ(restoration_score(img, "degraded", img, "restored", TaskKind::Rain, FixedScorer(4, 3)), -1.0);
  const HeuristicScorer h;
  const auto scene = calibration_scene(4, 64, 64);
  EXPECT_DOUBLE_EQ(restoration_score(scene, "a", scene, "a", TaskKind::Noise, h), 0.0);
  EXPECT_EQ(error_kind_of([&] { restoration_score(scene, "a", scene, "a", TaskKind::Flare, h); }),
            ErrorKind::unsupported);
}

TEST(Scorer, IngestionClampsAndLooksUp) {
  testutil::TempDir dir("scorer_ingest");
  testutil::write_text(dir / "scores.jsonl",
                       "{\"id\": \"degraded/rain/a\", \"task\": \"rain\", \"score\": 2}\n"
                       "\n"
                       "{\"id\": \"restored/rain/a\", \"task\": \"rain\", \"score\": 7}\n"
                       "{\"id\": \"restored/rain/b\", \"task\": \"rain\", \"score\": 0}\n");
  const auto s = IngestedScorer::from_jsonl(dir / "scores.jsonl");
  const auto img = constant_image(4, 4, 3, 0.0f);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s.score(img, image_key("degraded", TaskKind::Rain, "a"), TaskKind::Rain), 2.0);
  EXPECT_DOUBLE_EQ(s.score(img, "restored/rain/a", TaskKind::Rain), 5.0);
  EXPECT_DOUBLE_EQ(s.score(img, "restored/rain/b", TaskKind::Rain), 1.0);
  EXPECT_EQ(error_kind_of([&] { s.score(img, "restored/rain/a", TaskKind::Haze); }), ErrorKind::lookup);
}

TEST(Scorer, MalformedIngestionFileIsFormatError) {
  testutil::TempDir dir("scorer_bad");
  testutil::write_text(dir / "a.jsonl", "{\"id\": \"x\", \"task\": \"rain\"}\n");
  testutil::write_text(dir / "b.jsonl", "not json\n");
  testutil::write_text(dir / "c.jsonl", "{\"id\": \"x\", \"task\": \"sunburn\", \"score\": 2}\n");
  EXPECT_EQ(error_kind_of([&] { IngestedScorer::from_jsonl(dir / "a.jsonl"); }), ErrorKind::format);
  EXPECT_EQ(error_kind_of([&] { IngestedScorer::from_jsonl(dir / "b.jsonl"); }), ErrorKind::format);
  EXPECT_NE(error_kind_of([&] { IngestedScorer::from_jsonl(dir / "c.jsonl"); }), ErrorKind::io);
  EXPECT_EQ(error_kind_of([&] { IngestedScorer::from_jsonl(dir / "missing.jsonl"); }), ErrorKind::io);
}

// ---------------------------------------------------------------- distance backends

TEST(Distance, SelfDistanceIsZero) {
  const MsSsimDistance d;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto img = random_image(s, 97, 61);
    const auto r = d.dist(img, "a", img, "a");
    EXPECT_EQ(r.lps, 0.0);
    EXPECT_FALSE(r.resampled);
  }
}

TEST(Distance, BlackVersusWhiteMatchesConstantOracle) {
  // Constant inputs: zero variance gives cs = 1 at every scale and the
  // luminance term is C1 / (1 + C1), so MS-SSIM equals it for any weights.
  const double c1 = 0.01 * 0.01;
  const double expected = 1.0 - c1 / (1.0 + c1);
  const MsSsimDistance d;
  const auto black = constant_image(256, 256, 3, 0.0f), white = constant_image(256, 256, 3, 1.0f);
  const auto r = d.dist(black, "b", white, "w");
  EXPECT_GE(r.lps, 0.9);
  EXPECT_NEAR(r.lps, expected, 1e-6);
}

TEST(Distance, SymmetricAndBounded) {
  const MsSsimDistance d;
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto a = calibration_scene(100 + s, 96, 80);
    const auto b = random_image(900 + s, 96, 80);
    const double ab = d.dist(a, "a", b, "b").lps, ba = d.dist(b, "b", a, "a").lps;
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(Distance, GrowsWithDegradation) {
  const MsSsimDistance d;
  const auto img = calibration_scene(42, 128, 128);
  const auto mild = synthesize(img, TaskKind::Noise, 0.2, default_severity_map(), SeedTree(1, {})).image;
  const auto heavy = synthesize(img, TaskKind::Noise, 1.0, default_severity_map(), SeedTree(1, {})).image;
  EXPECT_LT(d.dist(img, "", mild, "").lps, d.dist(img, "", heavy, "").lps);
}

TEST(Distance, MismatchedSizesAreResampledAndRecorded) {
  const MsSsimDistance d;
  const auto a = calibration_scene(8, 128, 96);
  const auto b = resize_image(a, 64, 48, Interp::bilinear);
  const auto r = d.dist(a, "a", b, "b");
  EXPECT_TRUE(r.resampled);
  EXPECT_LT(r.lps, 0.5);
}

TEST(Distance, ScaleCountShrinksForSmallImages) {
  EXPECT_EQ(ms_ssim_scales(256, 256), 5);
  EXPECT_EQ(ms_ssim_scales(176, 500), 5);
  EXPECT_EQ(ms_ssim_scales(175, 500), 4);
  EXPECT_EQ(ms_ssim_scales(22, 22), 2);
  EXPECT_EQ(ms_ssim_scales(8, 8), 1);
  const auto tiny = random_image(1, 8, 8);
  EXPECT_EQ(MsSsimDistance().dist(tiny, "", tiny, "").lps, 0.0);
}

TEST(Distance, IngestionPassThroughAndSymmetricLookup) {
  testutil::TempDir dir("distance_ingest");
  testutil::write_text(dir / "d.jsonl", "{\"id_a\": \"degraded/haze/x\", \"id_b\": \"restored/haze/x\", \"dist\": 0.413}\n");
  const auto d = IngestedDistance::from_jsonl(dir / "d.jsonl");
  const auto img = constant_image(4, 4, 3, 0.0f);
  EXPECT_DOUBLE_EQ(d.dist(img, "degraded/haze/x", img, "restored/haze/x").lps, 0.413);
  EXPECT_DOUBLE_EQ(d.dist(img, "restored/haze/x", img, "degraded/haze/x").lps, 0.413);
  EXPECT_EQ(error_kind_of([&] { d.dist(img, "degraded/haze/y", img, "restored/haze/y"); }), ErrorKind::lookup);
}

TEST(Distance, IngestionRejectsOutOfRangeValues) {
  testutil::TempDir dir("distance_bad");
  testutil::write_text(dir / "d.jsonl", "{\"id_a\": \"a\", \"id_b\": \"b\", \"dist\": 1.5}\n");
  EXPECT_EQ(error_kind_of([&] { IngestedDistance::from_jsonl(dir / "d.jsonl"); }), ErrorKind::format);
}
