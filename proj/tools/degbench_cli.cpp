// degbench: synthesis, filtering, evaluation and schedule tooling.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "degbench/cli/commands.hpp"
#include "degbench/cli/synth.hpp"
#include "degbench/core/error.hpp"
#include "degbench/core/manifest.hpp"
#include "degbench/curriculum/schedule.hpp"
#include "degbench/metrics/instruction.hpp"

namespace fs = std::filesystem;
using namespace degbench;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: one per hardware thread
  std::optional<fs::path> out;
  std::string config;

  std::size_t worker_count() const {
    return workers ? workers : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  fs::path out_dir() const {
    require(out.has_value(), ErrorKind::usage, "--out is required");
    return *out;
  }
};

std::vector<TaskKind> parse_tasks(const std::vector<std::string>& names) {
  std::vector<TaskKind> tasks;
  for (const auto& n : names) {
    try {
      tasks.push_back(parse_task(n));
    } catch (const Error& e) {
      fail(ErrorKind::usage, e.what());
    }
  }
  return tasks;
}

void write_or_print(const std::optional<fs::path>& out, const std::string& text) {
  if (!out) {
    std::cout << text;
    return;
  }
  if (out->has_parent_path()) fs::create_directories(out->parent_path());
  write_text_atomic(*out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degradation synthesis, pair filtering and restoration evaluation.", "degbench"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.set_config("--config", "", "TOML file of option values; command-line flags take precedence");
  app.add_option("--seed", g.seed, "Root seed (64-bit)");
  app.add_option("--workers", g.workers, "Worker threads (0: one per hardware thread)");
  app.add_option("--out", g.out, "Output directory (file for schedule emit/sample)");

  // synth
  SynthOptions so;
  std::vector<std::string> synth_tasks;
  std::string severity = "uniform:0.25:1";
  std::string web_order = "fixed";
  std::optional<fs::path> replay, depth_dir, mask_dir, severity_map;
  std::map<std::string, fs::path> synth_banks;
  auto* synth = app.add_subcommand("synth", "Synthesize degraded pairs from a directory of clean images");
  synth->add_option("--input", so.input, "Directory of clean images");
  synth->add_option("--depth-dir", depth_dir, "Depth sidecars (<stem>.png); haze records without one are skipped");
  synth->add_option("--mask-dir", mask_dir, "Segmentation mask sidecars (<stem>.png)");
  synth->add_option("--tasks", synth_tasks, "Tasks to synthesize (default: all nine)")->delimiter(',');
  synth->add_option("--severity", severity, "Severity distribution: uniform:<lo>:<hi> or fixed:<v>")
      ->capture_default_str();
  synth->add_option("--severity-map", severity_map, "JSON severity map replacing the default");
  synth->add_option("--web-chain-prob", so.web_chain_prob, "Probability of the web-degradation chain")
      ->capture_default_str();
  synth->add_option("--web-order", web_order, "Web chain order: fixed or shuffled")->capture_default_str();
  synth->add_option("--bank", synth_banks, "Ingested pattern bank, kind=dir (moire, flare, rain, haze)");
  synth->add_flag("!--procedural-reflections", so.reflect_from_inputs,
                  "Draw reflection layers from procedural scenes instead of the other inputs");
  synth->add_option("--replay", replay, "Regenerate degraded images from an emitted manifest");

  // patterns gen
  auto* patterns = app.add_subcommand("patterns", "Pattern bank tools");
  patterns->require_subcommand(1);
  PatternGenOptions po;
  std::string pattern_kind = "moire";
  auto* pgen = patterns->add_subcommand("gen", "Write a procedural pattern bank");
  pgen->add_option("--kind", pattern_kind, "moire, flare, rain or haze")->capture_default_str();
  pgen->add_option("--count", po.count, "Number of assets")->capture_default_str();
  pgen->add_option("--size", po.size, "Side length in pixels")->capture_default_str();

  // filter
  FilterOptions fo;
  std::optional<fs::path> embeddings, watermarks, scores;
  auto* filter = app.add_subcommand("filter", "Run quality gates over a manifest");
  filter->add_option("--manifest", fo.manifest, "Input manifest");
  filter->add_option("--gates", fo.gates, "Gates in order: semantic, watermark, delta, shift")->delimiter(',');
  filter->add_option("--embeddings", embeddings, "Embedding or similarity file for the semantic gate");
  filter->add_option("--similarity-threshold", fo.similarity_threshold)->capture_default_str();
  filter->add_option("--watermarks", watermarks, "Watermark verdict file");
  filter->add_option("--scorer", fo.scorer, "Delta-gate scorer: heuristic or ingested")->capture_default_str();
  filter->add_option("--scores", scores, "Ingested score file for the delta gate");
  filter->add_option("--min-delta", fo.min_delta)->capture_default_str();
  filter->add_option("--shift-radius", fo.shift_radius)->capture_default_str();
  filter->add_option("--max-shift", fo.max_shift)->capture_default_str();

  // eval
  EvalOptions eo;
  std::optional<fs::path> eval_scores, eval_distances;
  auto* eval = app.add_subcommand("eval", "Score restored images against their degraded inputs");
  eval->require_subcommand(0, 1);
  eval->add_option("--degraded", eo.degraded, "Directory <task>/<stem>.png of degraded inputs");
  eval->add_option("--restored", eo.restored, "Directory <task>/<stem>.png of restored outputs");
  eval->add_option("--method", eo.method, "Method name in the leaderboard")->capture_default_str();
  eval->add_option("--scorer", eo.scorer, "heuristic or ingested")->capture_default_str();
  eval->add_option("--scores", eval_scores, "Ingested scores {id, task, score}");
  eval->add_option("--distance", eo.distance, "ms_ssim or ingested")->capture_default_str();
  eval->add_option("--distances", eval_distances, "Ingested distances {id_a, id_b, dist}");
  std::string instruction_task;
  auto* instruction = eval->add_subcommand("instruction", "Print the scoring instruction for a task");
  instruction->add_option("--task", instruction_task, "Task name")->required();

  // stats
  std::vector<fs::path> stats_manifests;
  auto* stats = app.add_subcommand("stats", "Per-task counts and severity histograms of manifests");
  stats->add_option("manifests", stats_manifests, "Manifest files")->required();

  // schedule
  auto* schedule = app.add_subcommand("schedule", "Training schedule tools");
  schedule->require_subcommand(1);
  int emit_stage = 1, sample_stage = 1;
  std::size_t draws = 1000;
  MixOptions mix;
  auto* emit = schedule->add_subcommand("emit", "Write the per-step learning rate as CSV");
  emit->add_option("--stage", emit_stage, "1 or 2")->required();
  auto* sample = schedule->add_subcommand("sample", "Write task and origin draws as JSON Lines");
  sample->add_option("--stage", sample_stage, "1 or 2")->required();
  sample->add_option("-n", draws, "Number of draws")->capture_default_str();
  sample->add_flag("--ramp", mix.ramp, "Ramp the synthetic share from the previous stage's");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::size_t workers = g.worker_count();
    if (*synth) {
      so.workers = workers;
      so.seed = g.seed;
      so.out = g.out_dir();
      if (replay) {
        const Manifest m = run_replay(*replay, so.out, workers, std::cerr);
        write_manifest(m, so.out / "manifest.jsonl");
        std::cerr << "replayed " << m.records.size() << " records into " << so.out << "\n";
        return 0;
      }
      require(!so.input.empty(), ErrorKind::usage, "synth needs --input (or --replay)");
      so.depth_dir = depth_dir;
      so.mask_dir = mask_dir;
      so.severity_map = severity_map;
      if (!synth_tasks.empty()) so.tasks = parse_tasks(synth_tasks);
      so.severity = SeverityDist::parse(severity);
      try {
        so.web_order = parse_order_policy(web_order);
        for (const auto& [k, dir] : synth_banks) so.banks[parse_pattern_kind(k)] = dir;
      } catch (const Error& e) {
        fail(ErrorKind::usage, e.what());
      }
      const SynthRun run = run_synth(so, std::cerr);
      std::cerr << "wrote " << run.manifest.records.size() << " records (" << run.skipped.size() << " skipped) to "
                << so.out / "manifest.jsonl" << "\n";
    } else if (*pgen) {
      try {
        po.kind = parse_pattern_kind(pattern_kind);
      } catch (const Error& e) {
        fail(ErrorKind::usage, e.what());
      }
      po.seed = g.seed;
      po.workers = workers;
      po.out = g.out_dir();
      const auto entries = run_patterns_gen(po);
      std::cerr << "wrote " << entries.size() << " " << pattern_kind << " assets to " << po.out << "\n";
    } else if (*filter) {
      require(!fo.manifest.empty(), ErrorKind::usage, "filter needs --manifest");
      fo.embeddings = embeddings;
      fo.watermarks = watermarks;
      fo.scores = scores;
      fo.workers = workers;
      fo.out = g.out_dir();
      const FilterOutcome o = run_filter(fo);
      std::cout << filter_summary_json(o).dump(2) << "\n";
    } else if (*instruction) {
      TaskKind task;
      try {
        task = parse_task(instruction_task);
      } catch (const Error& e) {
        fail(ErrorKind::usage, e.what());
      }
      write_or_print(g.out, render_scoring_instruction(task));
    } else if (*eval) {
      require(!eo.degraded.empty() && !eo.restored.empty(), ErrorKind::usage, "eval needs --degraded and --restored");
      eo.scores = eval_scores;
      eo.distances = eval_distances;
      eo.workers = workers;
      eo.out = g.out_dir();
      const EvalRun run = run_eval(eo);
      for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
      write_eval_outputs(run, eo.out);
      std::cout << emit_leaderboard(Leaderboard{{run.board}}, BoardFormat::csv);
    } else if (*stats) {
      const StatsReport s = run_stats(stats_manifests);
      if (g.out) {
        fs::create_directories(*g.out);
        write_text_atomic(*g.out / "stats.json", stats_json(s).dump(2) + "\n");
        write_text_atomic(*g.out / "stats.md", stats_markdown(s));
      }
      std::cout << stats_markdown(s);
    } else if (*emit) {
      write_or_print(g.out, lr_csv(default_stage(emit_stage)));
    } else if (*sample) {
      write_or_print(g.out, draw_log_jsonl(draw_log(default_stage(sample_stage), g.seed, draws, mix, workers)));
    }
  } catch (const Error& e) {
    std::cerr << "degbench: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "degbench: io error: " << e.what() << "\n";
    return exit_code(ErrorKind::io);
  } catch (const std::exception& e) {
    std::cerr << "degbench: " << e.what() << "\n";
    return exit_code(ErrorKind::format);
  }
  return 0;
}
