// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "degbench/cli/commands.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image_io.hpp"
#include "degbench/core/manifest.hpp"
#include "degbench/core/scene.hpp"
#include "degbench/curriculum/schedule.hpp"
#include "degbench/degradations/apply.hpp"
#include "degbench/degradations/photometric.hpp"
#include "degbench/filtering/pipeline.hpp"
#include "degbench/filtering/skeleton.hpp"
#include "degbench/metrics/correlation.hpp"
#include "degbench/metrics/heuristic.hpp"
#include "degbench/metrics/scores.hpp"
#include "degbench/patterns/sidecar.hpp"
#include "published_tables.hpp"

using namespace degbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(DEGBENCH_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string(DEGBENCH_CLI_PATH) + " " + args + " > " + stdout_file.string() + " 2> " +
                          stdout_file.string() + ".err";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ImageBuffer noise_image(std::uint64_t seed, int w, int h) {
  Rng rng(seed);
  ImageBuffer img(w, h, 3);
  for (float& v : img.data()) v = static_cast<float>(rng.uniform());
  return img;
}

// 1 --------------------------------------------------------------------------
Outcome final_score_cells() {
  double worst = 0.0;
  std::size_t cells = 0;
  for (const auto& row : testutil::kPublishedRows)
    for (const auto& c : row.tasks) {
      worst = std::max(worst, std::fabs(final_score(c.lps, c.rs) - c.fs));
      ++cells;
    }
  const bool anchors = format_half_even(final_score(0.429, 2.063)) == "0.236" &&
                       format_half_even(final_score(0.468, 2.320)) == "0.247";
  return {cells == 72 && worst <= 0.0015 && anchors,
          std::to_string(cells) + " cells, max |FS - printed| = " + fmt("%.5f", worst) +
              (anchors ? ", anchors 0.236/0.247 ok" : ", anchor mismatch")};
}

// 2 --------------------------------------------------------------------------
Outcome aggregation() {
  std::string detail;
  bool ok = true;
  for (const auto* row : {&testutil::kPublishedRows.front(), &testutil::kPublishedRows.back()}) {
    std::vector<TaskReport> reports;
    for (std::size_t i = 0; i < kTableOrder.size(); ++i)
      reports.push_back(make_task_report(kTableOrder[i], 1, row->tasks[i].lps, row->tasks[i].rs));
    const MethodBoard b = compose_board(std::string(row->method), reports);
    const auto& o = b.overall;
    ok = ok && o.tasks == 9 && std::fabs(o.mean_lps - row->overall.lps) <= 0.001 &&
         std::fabs(o.mean_rs - row->overall.rs) <= 0.001 && std::fabs(o.fs - row->overall.fs) <= 0.001;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(row->method) + " (" + fmt("%.4f", o.mean_lps) +
              ", " + fmt("%.4f", o.mean_rs) + ", " + fmt("%.4f", o.fs) + ")";
  }
  return {ok, detail};
}

// 3 --------------------------------------------------------------------------
Outcome dataset_totals() {
  Manifest m;
  m.records.reserve(testutil::kPublishedTotal);
  std::uint64_t k = 0;
  for (const auto& row : testutil::kPublishedCounts)
    for (Origin origin : {Origin::synthetic, Origin::real}) {
      const std::uint64_t n = origin == Origin::synthetic ? row.synthetic : row.real;
      for (std::uint64_t i = 0; i < n; ++i, ++k) {
        PairRecord r;
        r.clean_path = "c" + std::to_string(k);
        r.degraded_path = "d" + std::to_string(k);
        r.task = row.task;
        r.origin = origin;
        r.params = nullptr;
        m.records.push_back(std::move(r));
      }
    }
  m.validate();
  StatsReport report;
  report.add(m);
  const auto j = stats_json(report);
  bool ok = true;
  for (const auto& row : testutil::kPublishedCounts) {
    const auto& c = report.counts[row.task];
    ok = ok && c.synthetic == row.synthetic && c.real == row.real;
  }
  const auto& t = report.counts.totals;
  ok = ok && t.synthetic == testutil::kPublishedSyntheticTotal && t.real == testutil::kPublishedRealTotal &&
       t.total() == testutil::kPublishedTotal && j["totals"]["total"] == testutil::kPublishedTotal;
  return {ok, std::to_string(m.records.size()) + " records: " + std::to_string(t.synthetic) + " synthetic / " +
                  std::to_string(t.real) + " real / " + std::to_string(t.total()) + " total"};
}

// 4 --------------------------------------------------------------------------
Outcome haze_exactness() {
  double worst = 0.0;
  int cases = 0;
  const ImageBuffer img = noise_image(404, 48, 40);
  const Plane texture(48, 40, 0.7f);
  for (double d : {0.0, 0.25, 0.6, 1.0})
    for (double beta : {0.3, 1.1, 2.5, 4.0})
      for (double A : {0.6, 0.8, 1.0}) {
        const Plane depth(48, 40, static_cast<float>(d));
        const HazeParams p{beta, A, 0.0};
        const double t = std::exp(-beta * static_cast<double>(static_cast<float>(d)));
        for (const Plane* tex : {static_cast<const Plane*>(nullptr), &texture}) {
          const ImageBuffer out = apply_haze(img, depth, p, tex);
          for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
              for (int c = 0; c < 3; ++c) {
                const double expect = img.at(x, y, c) * t + A * (1.0 - t);
                worst = std::max(worst, std::fabs(out.at(x, y, c) - expect));
              }
          ++cases;
        }
      }
  return {worst <= 1e-6, std::to_string(cases) + " (depth, beta, A) cases, max error " + fmt("%.2e", worst)};
}

// 5 --------------------------------------------------------------------------
Outcome identity_at_zero() {
  const SeverityMap map = default_severity_map();
  double worst = 0.0;
  int exact = 0, total = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const int w = 40 + static_cast<int>(i % 5) * 12, h = 36 + static_cast<int>(i % 3) * 10;
    const ImageBuffer img = i % 2 ? noise_image(1000 + i, w, h) : calibration_scene(1000 + i, w, h);
    const Plane depth = calibration_depth(1000 + i, w, h);
    ApplyContext ctx;
    ctx.depth = &depth;
    for (TaskKind t : kAllTasks) {
      const ImageBuffer out = synthesize(img, t, 0.0, map, SeedTree(77, {static_cast<std::uint32_t>(i)}), ctx).image;
      double diff = 0.0;
      if (out.width() != img.width() || out.height() != img.height() || out.channels() != img.channels()) diff = 1.0;
      else
        for (std::size_t k = 0; k < img.size(); ++k)
          diff = std::max(diff, static_cast<double>(std::fabs(out.data()[k] - img.data()[k])));
      worst = std::max(worst, diff);
      exact += diff == 0.0;
      ++total;
    }
  }
  return {worst <= 1e-6, "20 images x 9 operators: " + std::to_string(exact) + "/" + std::to_string(total) +
                             " bit-exact, max deviation " + fmt("%.2e", worst)};
}

// 6 --------------------------------------------------------------------------
Outcome determinism() {
  constexpr int kImages = 50, kSize = 1024;
  const fs::path root = scratch("determinism");
  fs::create_directories(root / "in");
  fs::create_directories(root / "depth");
  for (int i = 0; i < kImages; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "scene_%03d", i);
    const std::uint64_t seed = 6000 + static_cast<std::uint64_t>(i);
    save_image(calibration_scene(seed, kSize, kSize), root / "in" / (std::string(stem) + ".png"), ImageFormat::png);
    save_depth_map(calibration_depth(seed, kSize, kSize), root / "depth" / (std::string(stem) + ".png"));
  }
  const std::string common = "synth --seed 20260101 --input " + (root / "in").string() + " --depth-dir " +
                             (root / "depth").string();
  std::vector<double> seconds;
  for (const auto& [name, workers] : std::vector<std::pair<std::string, int>>{{"a", 1}, {"b", 1}, {"c", 8}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const int code = run_cli(common + " --workers " + std::to_string(workers) + " --out " + (root / name).string(),
                             root / (name + ".log"));
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (code != 0) return {false, "synth run " + name + " exited with " + std::to_string(code)};
  }
  const std::string ma = read_file(root / "a/manifest.jsonl");
  const Manifest m = read_manifest(root / "a/manifest.jsonl");
  bool ok = m.records.size() == static_cast<std::size_t>(kImages) * 9 && ma == read_file(root / "b/manifest.jsonl") &&
            ma == read_file(root / "c/manifest.jsonl");
  std::size_t identical = 0;
  for (const auto& r : m.records) {
    const std::string a = read_file(root / "a" / r.degraded_path);
    const bool same = !a.empty() && a == read_file(root / "b" / r.degraded_path) && a == read_file(root / "c" / r.degraded_path);
    identical += same;
    ok = ok && same;
  }
  fs::remove_all(root);
  return {ok, std::to_string(m.records.size()) + " records at " + std::to_string(kSize) + "^2, " +
                  std::to_string(identical) + " degraded files identical across runs; manifests " +
                  (ok ? "byte-identical" : "differ") + "; wall time " + fmt("%.0f", seconds[0]) + "s/" +
                  fmt("%.0f", seconds[1]) + "s (1 worker), " + fmt("%.0f", seconds[2]) + "s (8 workers)"};
}

// 7 --------------------------------------------------------------------------
Outcome severity_monotonicity() {
  const SeverityMap map = default_severity_map();
  std::string detail;
  bool ok = true;
  for (TaskKind t : {TaskKind::Blur, TaskKind::Noise, TaskKind::LowLight, TaskKind::Haze, TaskKind::Compression}) {
    double worst = -1.0, mean = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const ImageBuffer img = calibration_scene(31000 + i, 256, 256);
      const Plane depth = calibration_depth(31000 + i, 256, 256);
      ApplyContext ctx;
      ctx.depth = &depth;
      const SeedTree seed(707, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(task_index(t))});
      std::vector<double> levels, scores;
      for (int k = 0; k < 10; ++k) {
        levels.push_back(k / 9.0);
        scores.push_back(heuristic_degradation_score(synthesize(img, t, k / 9.0, map, seed, ctx).image, t));
      }
      const double rho = spearman(levels, scores);
      worst = std::max(worst, rho);
      mean += rho / 20.0;
    }
    ok = ok && worst <= -0.9;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(task_name(t)) + " worst " + fmt("%.3f", worst) +
              " mean " + fmt("%.3f", mean);
  }
  return {ok, detail};
}

// 8 --------------------------------------------------------------------------
Outcome shift_accuracy() {
  Rng rng(8008);
  int hits = 0;
  constexpr int kTrials = 100;
  for (int trial = 0; trial < kTrials; ++trial) {
    const int dx = rng.uniform_int(-15, 15), dy = rng.uniform_int(-15, 15);
    const ImageBuffer a = calibration_scene(80000 + static_cast<std::uint64_t>(trial), 256, 256);
    ImageBuffer b(a.width(), a.height(), a.channels());
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x)
        for (int c = 0; c < a.channels(); ++c)
          b.at(x, y, c) = a.at(reflect_index(x - dx, a.width()), reflect_index(y - dy, a.height()), c);
    for (float& v : b.data()) v = static_cast<float>(std::clamp(v + 0.05 * rng.normal(), 0.0, 1.0));
    const FilterVerdict v = skeleton_shift_filter(a, b, 15, 15);
    const auto& m = v.measurements;
    if (m.count("dx") && std::abs(m.at("dx") - dx) <= 1.0 && std::abs(m.at("dy") - dy) <= 1.0) ++hits;
  }
  return {hits >= 95, std::to_string(hits) + "/" + std::to_string(kTrials) +
                          " translations within +-1 px (|d| <= 15, noise sigma 0.05 on the shifted image)"};
}

// 9 --------------------------------------------------------------------------
Outcome schedules() {
  const StageConfig s1 = default_stage(1), s2 = default_stage(2);
  bool constant = true;
  for (int step = s1.warmup_steps; step <= s1.steps; ++step) constant = constant && lr_at(s1, step) == 1e-5;
  const int mid = (s2.warmup_steps + s2.steps) / 2;
  const double end = lr_at(s2, 1500), half = lr_at(s2, mid);
  const auto tasks = task_sample(99, 9000);
  std::map<TaskKind, int> freq;
  for (TaskKind t : tasks) ++freq[t];
  double worst_freq = 0.0;
  for (TaskKind t : kAllTasks) worst_freq = std::max(worst_freq, std::fabs(freq[t] / 9000.0 - 1.0 / 9.0));
  const auto origins = mix_sample(s2, 99, 10000);
  const double real = static_cast<double>(std::count(origins.begin(), origins.end(), Origin::real)) / 10000.0;
  const bool ok = constant && s2.steps == 1500 && end == 0.0 && std::fabs(half - 5e-6) <= 1e-12 &&
                  worst_freq <= 0.015 && std::fabs(real - 0.8) <= 0.015;
  return {ok, std::string("stage-1 constant ") + (constant ? "yes" : "no") + ", stage-2 lr(1500) = " +
                  fmt("%g", end) + ", lr(" + std::to_string(mid) + ") = " + fmt("%.15g", half) +
                  ", max task-frequency deviation " + fmt("%.4f", worst_freq) + ", real fraction " +
                  fmt("%.4f", real)};
}

// 10 -------------------------------------------------------------------------
double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) less += w < v[i], equal += w == v[i];
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

double oracle_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tx = 0, ty = 0, n0 = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      ++n0;
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (x[i] == x[j]) ++tx;
      if (y[i] == y[j]) ++ty;
      if (s > 0) ++concordant;
      else if (s < 0) ++discordant;
    }
  return (concordant - discordant) / std::sqrt((n0 - tx) * (n0 - ty));
}

Outcome correlation_oracle() {
  std::size_t cases = 0, mismatches = 0, undefined = 0;
  double worst = 0.0;
  auto check = [&](const std::vector<double>& x, const std::vector<double>& y) {
    ++cases;
    const bool flat = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
                      std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    try {
      const Correlations c = rank_correlations(x, y);
      const double ptrue = oracle_pearson(x, y);
      const double plcc = pearson(x, y);
      const double d = std::max({std::fabs(c.kendall_tau_b - oracle_tau_b(x, y)),
                                 std::fabs(c.srcc - oracle_pearson(oracle_ranks(x), oracle_ranks(y))),
                                 std::fabs(plcc - ptrue), std::fabs(c.plcc - ptrue)});
      worst = std::max(worst, d);
      if (flat || d > 1e-12) ++mismatches;
    } catch (const Error& e) {
      if (!flat || e.kind() != ErrorKind::undefined) ++mismatches;
      ++undefined;
    }
  };
  // Every pair of sequences over {0,1,2} of length 2..4: ties everywhere.
  for (int n = 2; n <= 4; ++n) {
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int a = 0; a < combos; ++a)
      for (int b = 0; b < combos; ++b) {
        std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
        for (int i = 0, ca = a, cb = b; i < n; ++i, ca /= 3, cb /= 3) x[i] = ca % 3, y[i] = cb % 3;
        check(x, y);
      }
  }
  // Random integer sequences of length 5..8, tied (small alphabet) and untied (permutations).
  Rng rng(1010);
  for (int n = 5; n <= 8; ++n)
    for (int k = 0; k < 1500; ++k) {
      std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
      if (k % 2) {
        for (int i = 0; i < n; ++i) x[i] = i, y[i] = i;
        rng.shuffle(std::span<double>(x));
        rng.shuffle(std::span<double>(y));
      } else {
        const int alphabet = 2 + static_cast<int>(rng.below(4));
        for (int i = 0; i < n; ++i)
          x[i] = static_cast<double>(rng.below(alphabet)), y[i] = static_cast<double>(rng.below(alphabet));
      }
      check(x, y);
    }
  return {cases >= 10000 && mismatches == 0,
          std::to_string(cases) + " cases (" + std::to_string(undefined) + " zero-variance, rejected as undefined), " +
              std::to_string(mismatches) + " mismatches, max |diff| " + fmt("%.1e", worst)};
}

// 11 -------------------------------------------------------------------------
Outcome instruction_fidelity() {
  const fs::path root = scratch("instruction");
  const std::vector<std::string> anchors = {"the image is essentially clean", "(<= 20% area)", "(20--50% area)",
                                            "(50--80% area)", "(> 80% area)"};
  const std::string closing = "Return only in the format ``Degradation Score: <1--5>''";
  int good = 0;
  for (TaskKind t : kAllTasks) {
    const fs::path out = root / (std::string(task_name(t)) + ".txt");
    if (run_cli("eval instruction --task " + std::string(task_name(t)), out) != 0) continue;
    std::string text = read_file(out);
    bool ok = true;
    for (const auto& a : anchors) ok = ok && text.find(a) != std::string::npos;
    while (!text.empty() && text.back() == '\n') text.pop_back();
    ok = ok && text.size() >= closing.size() && text.compare(text.size() - closing.size(), closing.size(), closing) == 0;
    good += ok;
  }
  return {good == 9, std::to_string(good) + "/9 task instructions carry all scale anchors and the closing line"};
}

// 12 -------------------------------------------------------------------------
Outcome filter_partition() {
  Rng rng(1212);
  const ImageBuffer tiny(8, 8, 3, 0.5f);
  std::size_t violations = 0, records = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Manifest m;
    auto scores = std::make_shared<IngestedScorer>();
    auto marks = std::make_shared<WatermarkVerdicts>();
    const std::size_t n = rng.below(60);
    for (std::size_t i = 0; i < n; ++i) {
      PairRecord r;
      r.task = kAllTasks[rng.below(9)];
      r.clean_path = "clean/" + std::to_string(trial) + "_" + std::to_string(i) + ".png";
      r.degraded_path = "degraded/" + std::to_string(trial) + "_" + std::to_string(i) + ".png";
      r.origin = rng.bernoulli(0.5) ? Origin::synthetic : Origin::real;
      if (rng.bernoulli(0.9)) scores->add(r.clean_path, r.task, rng.uniform(1.0, 5.0));
      if (rng.bernoulli(0.9)) scores->add(r.degraded_path, r.task, rng.uniform(1.0, 5.0));
      if (rng.bernoulli(0.85)) marks->add(r.id(), rng.bernoulli(0.15));
      m.records.push_back(std::move(r));
    }
    std::vector<Gate> gates;
    if (rng.bernoulli(0.7)) gates.push_back(make_watermark_gate(marks));
    if (rng.bernoulli(0.7)) gates.push_back(make_delta_gate(scores, rng.uniform(0.0, 2.0)));
    if (gates.empty()) gates.push_back(make_pass_gate());
    FilterRunOptions opt;
    opt.loader = [&](const fs::path&) { return tiny; };
    opt.workers = 1 + rng.below(4);
    const FilterOutcome o = run_filter_pipeline(m, gates, opt);
    std::set<std::string> kept, rejected, input;
    for (const auto& r : m.records) input.insert(r.id());
    for (const auto& r : o.kept.records) kept.insert(r.id());
    for (const auto& r : o.rejected.records) rejected.insert(r.id());
    std::set<std::string> both;
    std::set_union(kept.begin(), kept.end(), rejected.begin(), rejected.end(), std::inserter(both, both.end()));
    std::size_t counted = 0;
    for (const auto& [reason, c] : o.counts) counted += c;
    const bool ok = o.kept.records.size() + o.rejected.records.size() == n && kept.size() + rejected.size() == n &&
                    both == input && counted == n;
    violations += !ok;
    records += n;
  }
  return {violations == 0, "1000 random manifests (" + std::to_string(records) + " records), " +
                               std::to_string(violations) + " partition violations"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"final-score cells", final_score_cells},
      {"overall-row aggregation", aggregation},
      {"dataset totals", dataset_totals},
      {"haze analytic exactness", haze_exactness},
      {"identity at severity zero", identity_at_zero},
      {"synthesis determinism", determinism},
      {"severity monotonicity", severity_monotonicity},
      {"shift filter accuracy", shift_accuracy},
      {"training schedules", schedules},
      {"correlation oracle", correlation_oracle},
      {"instruction fidelity", instruction_fidelity},
      {"filter partition", filter_partition},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed ? 1 : 0;
}
