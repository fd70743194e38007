#pragma once

// Command implementations behind the degbench tool, other than synthesis.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degbench/cli/synth.hpp"
#include "degbench/core/error.hpp"
#include "degbench/core/image_io.hpp"
#include "degbench/core/manifest.hpp"
#include "degbench/core/parallel.hpp"
#include "degbench/filtering/pipeline.hpp"
#include "degbench/metrics/backends.hpp"
#include "degbench/metrics/scores.hpp"
#include "degbench/patterns/bank.hpp"
#include "degbench/patterns/flare.hpp"
#include "degbench/patterns/haze_texture.hpp"
#include "degbench/patterns/moire.hpp"
#include "degbench/patterns/rain.hpp"

namespace degbench {

// ---------------------------------------------------------------- patterns gen

struct PatternGenOptions {
  PatternKind kind = PatternKind::moire;
  std::size_t count = 16;
  int size = 256;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::size_t workers = 1;
};

/// Asset i is drawn from SeedTree(seed, {kind, i}). Files are
/// <kind>_<index>.png; bank.jsonl lists each file with its parameters.
inline std::vector<nlohmann::ordered_json> run_patterns_gen(const PatternGenOptions& o) {
  require(o.count > 0, ErrorKind::usage, "pattern count must be positive");
  require(o.size >= 8, ErrorKind::usage, "pattern size must be at least 8");
  detail::ensure_dir(o.out);
  std::vector<nlohmann::ordered_json> entries(o.count);
  parallel_for(o.count, o.workers, [&](std::size_t i) {
    const SeedTree node(o.seed, {static_cast<std::uint32_t>(o.kind), static_cast<std::uint32_t>(i)});
    Rng rng = node.rng();
    nlohmann::ordered_json params;
    ImageBuffer img;
    switch (o.kind) {
      case PatternKind::moire: {
        const MoireParams p = sample_moire_params(rng, static_cast<MoireScale>(i % 3));
        img = gen_moire_pattern(p, o.size, o.size);
        params = moire_params_to_json(p);
        break;
      }
      case PatternKind::flare: {
        const auto kind = static_cast<FlareKind>(i % 3);
        const double kelvin = rng.uniform(2500.0, 9000.0);
        img = gen_flare_sprite(kind, 1.0, kelvin, node.child(0).key(), o.size);
        params = {{"kind", flare_kind_name(kind)}, {"color_temp", kelvin}};
        break;
      }
      case PatternKind::rain: {
        const RainStreakParams p = sample_rain_params(rng);
        img = gen_rain_streaks(p, o.size, o.size, node.child(0).key()).rgba;
        params = {{"density", p.density}, {"length", p.length}, {"angle", p.angle},
                  {"width", p.width},     {"wind_jitter", p.wind_jitter}};
        break;
      }
      case PatternKind::haze: {
        const int octaves = 1 + static_cast<int>(i % 4);
        img = gen_haze_texture(o.size, o.size, octaves, node.child(0).key());
        params = {{"octaves", octaves}};
        break;
      }
    }
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%05zu.png", std::string(pattern_kind_name(o.kind)).c_str(), i);
    detail::write_bytes_atomic(o.out / name, encode_png(img));
    nlohmann::ordered_json e;
    e["file"] = name;
    e["kind"] = pattern_kind_name(o.kind);
    e["seed_path"] = node.to_string();
    e["params"] = params;
    entries[i] = std::move(e);
  });
  std::string index;
  for (const auto& e : entries) index += e.dump() + "\n";
  write_text_atomic(o.out / "bank.jsonl", index);
  return entries;
}

// ---------------------------------------------------------------------- filter

struct FilterOptions {
  std::filesystem::path manifest;
  std::filesystem::path out;
  std::vector<std::string> gates;  // semantic, watermark, delta, shift; applied in listed order
  std::optional<std::filesystem::path> embeddings;  // semantic gate
  double similarity_threshold = kDefaultSimilarityThreshold;
  std::optional<std::filesystem::path> watermarks;  // watermark gate
  std::string scorer = "heuristic";                 // delta gate: heuristic | ingested
  std::optional<std::filesystem::path> scores;      // delta gate with the ingested scorer
  double min_delta = kDefaultMinDelta;
  int shift_radius = 15;
  int max_shift = 2;
  std::size_t workers = 1;
};

inline nlohmann::ordered_json filter_config_json(const FilterOptions& o) {
  auto opt = [](const std::optional<std::filesystem::path>& p) {
    return p ? nlohmann::ordered_json(p->string()) : nlohmann::ordered_json();
  };
  nlohmann::ordered_json j;
  j["command"] = "filter";
  j["manifest"] = o.manifest.string();
  j["gates"] = o.gates;
  j["embeddings"] = opt(o.embeddings);
  j["similarity_threshold"] = o.similarity_threshold;
  j["watermarks"] = opt(o.watermarks);
  j["scorer"] = o.scorer;
  j["scores"] = opt(o.scores);
  j["min_delta"] = o.min_delta;
  j["shift_radius"] = o.shift_radius;
  j["max_shift"] = o.max_shift;
  j["workers"] = o.workers;
  return j;
}

namespace detail {

inline const std::filesystem::path& require_input_file(const std::optional<std::filesystem::path>& p,
                                                       const std::string& what) {
  require(p.has_value(), ErrorKind::usage, what + " is required by the configured gates");
  require(std::filesystem::is_regular_file(*p), ErrorKind::usage, what + " '" + p->string() + "' does not exist");
  return *p;
}

/// Re-express relative record paths against `to` instead of `from`.
inline void rebase_paths(Manifest& m, const std::filesystem::path& from, const std::filesystem::path& to) {
  const auto a = std::filesystem::weakly_canonical(from), b = std::filesystem::weakly_canonical(to);
  if (a == b) return;
  auto fix = [&](std::string& p) {
    if (std::filesystem::path(p).is_absolute()) return;
    p = (a / p).lexically_normal().lexically_relative(b).generic_string();
  };
  for (auto& r : m.records) fix(r.clean_path), fix(r.degraded_path);
}

}  // namespace detail

inline std::vector<Gate> build_gates(const FilterOptions& o) {
  require(!o.gates.empty(), ErrorKind::usage, "filter needs at least one gate");
  std::vector<Gate> gates;
  for (const auto& name : o.gates) {
    if (name == "semantic") {
      const auto& path = detail::require_input_file(o.embeddings, "embeddings file");
      gates.push_back(make_semantic_gate(std::make_shared<FileEmbedder>(FileEmbedder::from_jsonl(path)),
                                         o.similarity_threshold));
    } else if (name == "watermark") {
      const auto& path = detail::require_input_file(o.watermarks, "watermark verdicts file");
      gates.push_back(make_watermark_gate(std::make_shared<WatermarkVerdicts>(WatermarkVerdicts::from_jsonl(path))));
    } else if (name == "delta") {
      std::shared_ptr<const ScorerBackend> scorer;
      if (o.scorer == "heuristic") scorer = std::make_shared<HeuristicScorer>();
      else if (o.scorer == "ingested")
        scorer = std::make_shared<IngestedScorer>(
            IngestedScorer::from_jsonl(detail::require_input_file(o.scores, "scores file")));
      else fail(ErrorKind::usage, "unknown scorer '" + o.scorer + "'");
      gates.push_back(make_delta_gate(scorer, o.min_delta));
    } else if (name == "shift") {
      require(o.max_shift >= 0 && o.shift_radius >= o.max_shift, ErrorKind::usage,
              "need 0 <= max_shift <= shift_radius");
      gates.push_back(make_shift_gate(o.shift_radius, o.max_shift));
    } else {
      fail(ErrorKind::usage, "unknown gate '" + name + "' (semantic, watermark, delta, shift)");
    }
  }
  return gates;
}

/// Kept and rejected manifests carry record paths relative to `out`.
inline FilterOutcome run_filter(const FilterOptions& o) {
  const std::vector<Gate> gates = build_gates(o);
  const Manifest input = read_manifest(o.manifest);
  const auto root = o.manifest.parent_path().empty() ? std::filesystem::path(".") : o.manifest.parent_path();
  FilterRunOptions ro;
  ro.base_dir = root;
  ro.workers = o.workers;
  FilterOutcome out = run_filter_pipeline(input, gates, ro);
  detail::ensure_dir(o.out);
  for (Manifest* m : {&out.kept, &out.rejected}) {
    detail::rebase_paths(*m, root, o.out);
    m->config = filter_config_json(o);
    m->config["source_config"] = input.config;
  }
  write_filter_outputs(out, o.out);
  return out;
}

// ------------------------------------------------------------------------ eval

struct EvalOptions {
  std::filesystem::path degraded;  // <dir>/<task>/<stem>.<ext>
  std::filesystem::path restored;  // same layout
  std::filesystem::path out;
  std::string method = "method";
  std::string scorer = "heuristic";  // heuristic | ingested
  std::optional<std::filesystem::path> scores;
  std::string distance = "ms_ssim";  // ms_ssim | ingested
  std::optional<std::filesystem::path> distances;
  std::size_t workers = 1;
};

struct EvalRun {
  std::vector<EvalRecord> records;  // id "<task>/<stem>", sorted
  MethodBoard board;
  std::vector<std::string> warnings;
};

namespace detail {

/// (task, stem) -> file for every image under <dir>/<task>/.
inline std::map<std::pair<TaskKind, std::string>, std::filesystem::path> list_task_images(
    const std::filesystem::path& dir, std::vector<std::string>& warnings) {
  require(std::filesystem::is_directory(dir), ErrorKind::io, "'" + dir.string() + "' is not a directory");
  std::map<std::pair<TaskKind, std::string>, std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_directory()) continue;
    const std::string name = e.path().filename().string();
    TaskKind task;
    try {
      task = parse_task(name);
    } catch (const Error&) {
      warnings.push_back("ignored directory '" + e.path().string() + "': not a task name");
      continue;
    }
    for (const auto& f : list_images(e.path())) {
      const bool fresh = out.emplace(std::pair{task, f.stem().string()}, f).second;
      if (!fresh) warnings.push_back("duplicate stem '" + f.stem().string() + "' in " + e.path().string());
    }
  }
  return out;
}

}  // namespace detail

inline EvalRun run_eval(const EvalOptions& o) {
  EvalRun run;
  std::shared_ptr<const ScorerBackend> scorer;
  if (o.scorer == "heuristic") scorer = std::make_shared<HeuristicScorer>();
  else if (o.scorer == "ingested")
    scorer = std::make_shared<IngestedScorer>(
        IngestedScorer::from_jsonl(detail::require_input_file(o.scores, "scores file")));
  else fail(ErrorKind::usage, "unknown scorer '" + o.scorer + "'");
  std::shared_ptr<const DistanceBackend> distance;
  if (o.distance == "ms_ssim") distance = std::make_shared<MsSsimDistance>();
  else if (o.distance == "ingested")
    distance = std::make_shared<IngestedDistance>(
        IngestedDistance::from_jsonl(detail::require_input_file(o.distances, "distances file")));
  else fail(ErrorKind::usage, "unknown distance '" + o.distance + "'");

  const auto deg = detail::list_task_images(o.degraded, run.warnings);
  const auto res = detail::list_task_images(o.restored, run.warnings);
  std::vector<std::pair<TaskKind, std::string>> matched;
  std::vector<bool> skipped_task(kAllTasks.size(), false);
  for (const auto& [key, path] : deg) {
    const std::string id = std::string(task_name(key.first)) + "/" + key.second;
    if (!res.count(key)) {
      run.warnings.push_back("unmatched id " + id + ": no restored image; excluded");
      continue;
    }
    if (!scorer->supports(key.first)) {
      if (!skipped_task[task_index(key.first)])
        run.warnings.push_back(std::string(scorer->name()) + " scorer does not cover task " +
                               std::string(task_name(key.first)) + "; its records are excluded");
      skipped_task[task_index(key.first)] = true;
      continue;
    }
    matched.push_back(key);
  }
  for (const auto& [key, path] : res)
    if (!deg.count(key))
      run.warnings.push_back("unmatched id " + std::string(task_name(key.first)) + "/" + key.second +
                             ": no degraded image; excluded");
  require(!matched.empty(), ErrorKind::usage, "no matched records to evaluate");

  run.records.resize(matched.size());
  std::vector<char> resampled(matched.size(), 0);
  parallel_for(matched.size(), o.workers, [&](std::size_t i) {
    const auto& [task, stem] = matched[i];
    const ImageBuffer d = load_image(deg.at(matched[i]));
    const ImageBuffer r = load_image(res.at(matched[i]));
    const std::string did = image_key("degraded", task, stem), rid = image_key("restored", task, stem);
    const DistanceResult lps = distance->dist(d, did, r, rid);
    resampled[i] = lps.resampled;
    run.records[i] = make_eval_record(std::string(task_name(task)) + "/" + stem, task, scorer->score(d, did, task),
                                      scorer->score(r, rid, task), lps.lps);
  });
  for (std::size_t i = 0; i < matched.size(); ++i)
    if (resampled[i]) run.warnings.push_back("restored image " + run.records[i].image_id + " resampled to the input size");
  run.board = aggregate(run.records, o.method);
  for (const auto& w : run.board.warnings) run.warnings.push_back(w);
  return run;
}

inline nlohmann::ordered_json eval_record_json(const EvalRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.image_id;
  j["task"] = task_name(r.task);
  j["deg_score"] = r.deg_score;
  j["restored_score"] = r.restored_score;
  j["rs"] = r.rs;
  j["lps"] = r.lps;
  j["fs"] = r.fs;
  return j;
}

/// leaderboard.csv, leaderboard.md and records.jsonl.
inline void write_eval_outputs(const EvalRun& run, const std::filesystem::path& dir) {
  detail::ensure_dir(dir);
  const Leaderboard board{{run.board}};
  write_text_atomic(dir / "leaderboard.csv", emit_leaderboard(board, BoardFormat::csv));
  write_text_atomic(dir / "leaderboard.md", emit_leaderboard(board, BoardFormat::markdown));
  std::string lines;
  for (const auto& r : run.records) lines += eval_record_json(r).dump() + "\n";
  write_text_atomic(dir / "records.jsonl", lines);
}

// ----------------------------------------------------------------------- stats

inline constexpr std::size_t kSeverityBins = 10;

struct StatsReport {
  std::size_t manifests = 0;
  DatasetStats counts;
  std::array<std::array<std::uint64_t, kSeverityBins>, 9> severity_hist{};  // per task, bins of width 0.1

  void add(const Manifest& m) {
    ++manifests;
    counts += dataset_stats(m);
    for (const auto& r : m.records) {
      const auto bin = std::min(kSeverityBins - 1, static_cast<std::size_t>(r.severity.value() * kSeverityBins));
      ++severity_hist[task_index(r.task)][bin];
    }
  }
};

inline StatsReport run_stats(const std::vector<std::filesystem::path>& manifests) {
  require(!manifests.empty(), ErrorKind::usage, "stats needs at least one manifest");
  StatsReport s;
  for (const auto& p : manifests) s.add(read_manifest(p));
  return s;
}

inline nlohmann::ordered_json stats_json(const StatsReport& s) {
  nlohmann::ordered_json tasks = nlohmann::ordered_json::object();
  for (TaskKind t : kTableOrder) {
    const auto& c = s.counts[t];
    nlohmann::ordered_json j;
    j["synthetic"] = c.synthetic;
    j["real"] = c.real;
    j["total"] = c.total();
    j["severity_histogram"] = s.severity_hist[task_index(t)];
    tasks[std::string(task_name(t))] = j;
  }
  nlohmann::ordered_json j;
  j["manifests"] = s.manifests;
  j["tasks"] = tasks;
  j["totals"] = {{"synthetic", s.counts.totals.synthetic},
                 {"real", s.counts.totals.real},
                 {"total", s.counts.totals.total()}};
  return j;
}

inline std::string stats_markdown(const StatsReport& s) {
  std::ostringstream out;
  out << "| Task | Synthetic | Real | Total |\n|---|---:|---:|---:|\n";
  for (TaskKind t : kTableOrder) {
    const auto& c = s.counts[t];
    out << "| " << task_display_name(t) << " | " << c.synthetic << " | " << c.real << " | " << c.total() << " |\n";
  }
  const auto& c = s.counts.totals;
  out << "| Total | " << c.synthetic << " | " << c.real << " | " << c.total() << " |\n";
  return out.str();
}

}  // namespace degbench
