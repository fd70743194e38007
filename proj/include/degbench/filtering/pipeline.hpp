#pragma once

// Ordered gate pipeline over a manifest: each record stops at its first
// failing gate and lands in exactly one of the kept or rejected manifests.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "degbench/core/error.hpp"
#include "degbench/core/image_io.hpp"
#include "degbench/core/manifest.hpp"
#include "degbench/core/parallel.hpp"
#include "degbench/filtering/delta.hpp"
#include "degbench/filtering/semantic.hpp"
#include "degbench/filtering/skeleton.hpp"
#include "degbench/filtering/verdict.hpp"
#include "degbench/filtering/watermark.hpp"
#include "degbench/metrics/backends.hpp"

namespace degbench {

using ImageLoader = std::function<ImageBuffer(const std::filesystem::path&)>;

/// Lazily loaded clean and degraded images of one record.
class PairImages {
 public:
  PairImages(const PairRecord& r, std::filesystem::path base_dir, ImageLoader loader)
      : record_(r), base_(std::move(base_dir)), loader_(std::move(loader)) {}

  const ImageBuffer& clean() { return get(clean_, record_.clean_path); }
  const ImageBuffer& degraded() { return get(degraded_, record_.degraded_path); }

 private:
  const ImageBuffer& get(std::optional<ImageBuffer>& slot, const std::string& p) {
    if (!slot) {
      const auto path = resolve_record_path(base_, p);
      slot = loader_ ? loader_(path) : load_image(path);
    }
    return *slot;
  }

  const PairRecord& record_;
  std::filesystem::path base_;
  ImageLoader loader_;
  std::optional<ImageBuffer> clean_, degraded_;
};

/// Gates must be safe to call concurrently.
struct Gate {
  std::string name;
  std::function<FilterVerdict(const PairRecord&, PairImages&)> check;
};

inline Gate make_pass_gate(std::string name = "pass") {
  return {std::move(name), [](const PairRecord&, PairImages&) { return FilterVerdict::accept(); }};
}

/// Similarity of the degraded image to its task prompt. Tasks without a prompt pass.
inline Gate make_semantic_gate(std::shared_ptr<const EmbedderBackend> backend,
                               double threshold = kDefaultSimilarityThreshold,
                               PromptConfig prompts = prompt_config_default()) {
  require(backend != nullptr, ErrorKind::config, "semantic gate needs an embedder");
  return {"semantic", [backend, threshold, prompts](const PairRecord& r, PairImages& img) {
            if (!prompts.prompt(r.task)) return FilterVerdict::accept({{"applicable", 0.0}});
            return semantic_filter(img.degraded(), r.id(), r.task, *backend, threshold, prompts);
          }};
}

/// Score drop from clean to degraded. Records the scorer cannot rate (task not
/// covered, or no ingested entry) are rejected as indeterminate.
inline Gate make_delta_gate(std::shared_ptr<const ScorerBackend> scorer, double min_delta = kDefaultMinDelta) {
  require(scorer != nullptr, ErrorKind::config, "delta gate needs a scorer");
  return {"delta", [scorer, min_delta](const PairRecord& r, PairImages& img) {
            if (!scorer->supports(r.task)) return FilterVerdict::reject(FilterReason::external_reject, {{"scored", 0.0}});
            double clean = 0, degraded = 0;
            try {
              clean = scorer->score(img.clean(), r.clean_path, r.task);
              degraded = scorer->score(img.degraded(), r.degraded_path, r.task);
            } catch (const Error& e) {
              if (e.kind() != ErrorKind::lookup) throw;
              return FilterVerdict::reject(FilterReason::external_reject, {{"scored", 0.0}});
            }
            return degradation_delta_filter(clean, degraded, min_delta);
          }};
}

inline Gate make_shift_gate(int search_radius, int max_shift, SkeletonParams params = {}) {
  require(max_shift >= 0 && search_radius >= max_shift, ErrorKind::config, "need 0 <= max_shift <= search_radius");
  return {"shift", [=](const PairRecord&, PairImages& img) {
            return skeleton_shift_filter(img.clean(), img.degraded(), search_radius, max_shift, params);
          }};
}

/// Watermark verdict keyed by the record id (its degraded path).
inline Gate make_watermark_gate(std::shared_ptr<const WatermarkVerdicts> verdicts) {
  require(verdicts != nullptr, ErrorKind::config, "watermark gate needs verdicts");
  return {"watermark",
          [verdicts](const PairRecord& r, PairImages&) { return watermark_filter(r.id(), *verdicts); }};
}

struct FilterReportEntry {
  std::string id;
  bool pass = true;
  FilterReason reason = FilterReason::ok;
  std::string gate;                           // failing gate, empty when kept
  std::map<std::string, double> measurements;  // "<gate>.<name>"
};

inline nlohmann::ordered_json report_entry_to_json(const FilterReportEntry& e) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["pass"] = e.pass;
  j["reason"] = reason_name(e.reason);
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& [k, v] : e.measurements) m[k] = v;
  j["measurements"] = m;
  return j;
}

struct FilterOutcome {
  Manifest kept;
  Manifest rejected;
  std::vector<FilterReportEntry> report;  // input order
  std::map<FilterReason, std::size_t> counts;

  std::size_t input_count() const noexcept { return kept.records.size() + rejected.records.size(); }
};

struct FilterRunOptions {
  std::filesystem::path base_dir;
  ImageLoader loader;  // load_image when empty
  std::size_t workers = 1;
};

/// Applies gates in order; the first failing gate decides the reason.
inline FilterOutcome run_filter_pipeline(const Manifest& input, const std::vector<Gate>& gates,
                                         const FilterRunOptions& opt = {}) {
  require(!gates.empty(), ErrorKind::usage, "filter pipeline needs at least one gate");
  const std::size_t n = input.records.size();
  std::vector<FilterReportEntry> entries(n);
  parallel_for(n, opt.workers, [&](std::size_t i) {
    const PairRecord& r = input.records[i];
    PairImages images(r, opt.base_dir, opt.loader);
    FilterReportEntry& e = entries[i];
    e.id = r.id();
    for (const Gate& g : gates) {
      const FilterVerdict v = g.check(r, images);
      for (const auto& [k, x] : v.measurements) e.measurements[g.name + "." + k] = x;
      if (!v.pass) {
        e.pass = false;
        e.reason = v.reason;
        e.gate = g.name;
        break;
      }
    }
  });
  FilterOutcome out;
  out.kept.config = out.rejected.config = input.config;
  for (FilterReason r : kAllReasons) out.counts[r] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    (entries[i].pass ? out.kept : out.rejected).records.push_back(input.records[i]);
    ++out.counts[entries[i].reason];
  }
  out.report = std::move(entries);
  return out;
}

inline nlohmann::ordered_json filter_summary_json(const FilterOutcome& o) {
  nlohmann::ordered_json j;
  j["input"] = o.input_count();
  j["kept"] = o.kept.records.size();
  j["rejected"] = o.rejected.records.size();
  nlohmann::ordered_json by = nlohmann::ordered_json::object();
  for (const auto& [r, c] : o.counts) by[std::string(reason_name(r))] = c;
  j["by_reason"] = by;
  return j;
}

/// kept.jsonl, rejected.jsonl (with meta sidecars), filter_report.jsonl and summary.json.
inline void write_filter_outputs(const FilterOutcome& o, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create '" + dir.string() + "': " + ec.message());
  write_manifest(o.kept, dir / "kept.jsonl");
  write_manifest(o.rejected, dir / "rejected.jsonl");
  std::string report;
  for (const auto& e : o.report) report += report_entry_to_json(e).dump() + "\n";
  write_text_atomic(dir / "filter_report.jsonl", report);
  write_text_atomic(dir / "summary.json", filter_summary_json(o).dump(2) + "\n");
}

}  // namespace degbench
