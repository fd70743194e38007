#pragma once

// Dataset synthesis over a directory of clean images, and bit-exact replay of
// an emitted manifest.
//
// Output layout under the output directory:
//   clean/<stem>.png           8-bit copy of each input (the synthesis source)
//   depth/<stem>.png           16-bit depth sidecar copy, when supplied
//   mask/<stem>.png            segmentation sidecar copy, when supplied
//   degraded/<task>/<stem>.png
//   manifest.jsonl (+ .meta.json)

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degbench/core/error.hpp"
#include "degbench/core/image_io.hpp"
#include "degbench/core/manifest.hpp"
#include "degbench/core/parallel.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/core/task.hpp"
#include "degbench/degradations/apply.hpp"
#include "degbench/degradations/severity.hpp"
#include "degbench/patterns/bank.hpp"
#include "degbench/patterns/sidecar.hpp"

namespace degbench {

/// Severity distribution: "uniform:<lo>:<hi>" or "fixed:<v>".
struct SeverityDist {
  bool fixed = false;
  double lo = 0.25;
  double hi = 1.0;

  static SeverityDist parse(const std::string& text) {
    SeverityDist d;
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i)
      if (i == text.size() || text[i] == ':') parts.push_back(text.substr(start, i - start)), start = i + 1;
    auto num = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
      } catch (const std::exception&) {
      }
      fail(ErrorKind::usage, "bad number '" + s + "' in --severity '" + text + "'");
    };
    if (parts.size() == 3 && parts[0] == "uniform") {
      d.lo = num(parts[1]), d.hi = num(parts[2]);
    } else if (parts.size() == 2 && parts[0] == "fixed") {
      d.fixed = true;
      d.lo = d.hi = num(parts[1]);
    } else {
      fail(ErrorKind::usage, "--severity must be uniform:<lo>:<hi> or fixed:<v>, got '" + text + "'");
    }
    require(d.lo >= 0.0 && d.hi <= 1.0 && d.lo <= d.hi, ErrorKind::usage,
            "--severity '" + text + "' must satisfy 0 <= lo <= hi <= 1");
    return d;
  }

  std::string to_string() const {
    return fixed ? "fixed:" + format_double(lo) : "uniform:" + format_double(lo) + ":" + format_double(hi);
  }

  double draw(Rng& rng) const { return fixed ? lo : rng.uniform(lo, hi); }

 private:
  static std::string format_double(double v) {
    nlohmann::json j = v;
    return j.dump();
  }
};

struct SynthOptions {
  std::filesystem::path input;
  std::filesystem::path out;
  std::optional<std::filesystem::path> depth_dir;
  std::optional<std::filesystem::path> mask_dir;
  std::optional<std::filesystem::path> severity_map;  // JSON; default map when absent
  std::map<PatternKind, std::filesystem::path> banks;  // ingested banks replacing procedural ones
  std::vector<TaskKind> tasks{kAllTasks.begin(), kAllTasks.end()};
  SeverityDist severity;
  double web_chain_prob = 0.0;
  OrderPolicy web_order = OrderPolicy::fixed;
  bool reflect_from_inputs = true;  // reflection layers drawn from the other inputs
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

inline nlohmann::ordered_json synth_config_json(const SynthOptions& o) {
  nlohmann::ordered_json j;
  j["command"] = "synth";
  j["input"] = o.input.string();
  j["depth_dir"] = o.depth_dir ? nlohmann::ordered_json(o.depth_dir->string()) : nlohmann::ordered_json();
  j["mask_dir"] = o.mask_dir ? nlohmann::ordered_json(o.mask_dir->string()) : nlohmann::ordered_json();
  j["severity_map"] = o.severity_map ? nlohmann::ordered_json(o.severity_map->string()) : nlohmann::ordered_json();
  nlohmann::ordered_json banks = nlohmann::ordered_json::object();
  for (const auto& [k, p] : o.banks) banks[std::string(pattern_kind_name(k))] = p.string();
  j["banks"] = banks;
  nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
  for (TaskKind t : o.tasks) tasks.push_back(task_name(t));
  j["tasks"] = tasks;
  j["severity"] = o.severity.to_string();
  j["web_chain_prob"] = o.web_chain_prob;
  j["web_order"] = o.web_order == OrderPolicy::fixed ? "fixed" : "shuffled";
  j["reflect_from_inputs"] = o.reflect_from_inputs;
  j["seed"] = o.seed;
  j["workers"] = o.workers;
  return j;
}

struct SynthRun {
  Manifest manifest;
  std::vector<std::string> skipped;  // "<stem>/<task>: reason"
};

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create '" + dir.string() + "': " + ec.message());
}

/// Write through a sibling temporary and a rename.
inline void write_bytes_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  write_text_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  require(std::filesystem::is_directory(dir), ErrorKind::io, "'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && is_image_path(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

/// First image in `dir` whose stem is `stem`.
inline std::optional<std::filesystem::path> find_sidecar(const std::filesystem::path& dir, const std::string& stem) {
  if (!std::filesystem::is_directory(dir)) return std::nullopt;
  for (const auto& p : list_images(dir))
    if (p.stem().string() == stem) return p;
  return std::nullopt;
}

inline AssetLibrary load_assets(const std::map<PatternKind, std::filesystem::path>& banks, std::ostream& log) {
  AssetLibrary lib;
  for (const auto& [kind, dir] : banks) {
    PatternBank b = load_pattern_bank(dir, std::string(pattern_kind_name(kind)));
    for (const auto& w : b.warnings) log << "warning: " << w << "\n";
    switch (kind) {
      case PatternKind::moire: lib.moire = std::move(b); break;
      case PatternKind::flare: lib.flare = std::move(b); break;
      case PatternKind::rain: lib.rain = std::move(b); break;
      case PatternKind::haze: lib.haze = std::move(b); break;
    }
  }
  return lib;
}

inline SeverityMap load_severity_map(const std::optional<std::filesystem::path>& path) {
  if (!path) return default_severity_map();
  std::ifstream in(*path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open severity map '" + path->string() + "'");
  try {
    return severity_map_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, path->string() + ": " + e.what());
  }
}

inline std::string degraded_rel(TaskKind t, const std::string& stem) {
  return "degraded/" + std::string(task_name(t)) + "/" + stem + ".png";
}

struct Sidecars {
  std::optional<Plane> depth;
  std::optional<SegMask> mask;
};

/// Sidecar copies stored next to a manifest, resampled to the image size.
inline Sidecars load_sidecar_copies(const std::filesystem::path& root, const std::string& stem, int w, int h) {
  Sidecars s;
  const auto depth = root / "depth" / (stem + ".png");
  if (std::filesystem::exists(depth)) s.depth = load_depth_map(depth, w, h).d;
  const auto mask = root / "mask" / (stem + ".png");
  if (std::filesystem::exists(mask)) s.mask = load_seg_mask(mask, w, h);
  return s;
}

}  // namespace detail

/// Record seeds are SeedTree(seed, {image index, task index}); the severity
/// draw uses child(3) of the record seed.
inline SynthRun run_synth(const SynthOptions& o, std::ostream& log) {
  require(!o.tasks.empty(), ErrorKind::usage, "synth needs at least one task");
  require(o.web_chain_prob >= 0.0 && o.web_chain_prob <= 1.0, ErrorKind::usage, "web_chain_prob must lie in [0,1]");
  const auto inputs = detail::list_images(o.input);
  require(!inputs.empty(), ErrorKind::usage, "no input images in '" + o.input.string() + "'");
  std::vector<std::string> stems;
  {
    std::set<std::string> seen;
    for (const auto& p : inputs) {
      stems.push_back(p.stem().string());
      require(seen.insert(stems.back()).second, ErrorKind::usage, "two inputs share the stem '" + stems.back() + "'");
    }
  }
  const SeverityMap map = detail::load_severity_map(o.severity_map);
  const AssetLibrary assets = detail::load_assets(o.banks, log);
  for (const char* sub : {"clean", "depth", "mask"}) detail::ensure_dir(o.out / sub);
  for (TaskKind t : o.tasks) detail::ensure_dir(o.out / "degraded" / std::string(task_name(t)));

  // Clean copies and sidecars first; synthesis reads them back so that replay
  // from the output directory sees exactly the same inputs.
  std::vector<char> has_depth(inputs.size(), 0);
  parallel_for(inputs.size(), o.workers, [&](std::size_t i) {
    const auto bytes = encode_png(load_image(inputs[i]));
    detail::write_bytes_atomic(o.out / "clean" / (stems[i] + ".png"), bytes);
    const ImageBuffer clean = decode_image(bytes, stems[i]);
    if (o.depth_dir) {
      if (const auto d = detail::find_sidecar(*o.depth_dir, stems[i])) {
        save_depth_map(load_depth_map(*d, clean.width(), clean.height()).d, o.out / "depth" / (stems[i] + ".png"));
        has_depth[i] = 1;
      }
    }
    if (o.mask_dir) {
      if (const auto m = detail::find_sidecar(*o.mask_dir, stems[i]))
        save_seg_mask(load_seg_mask(*m, clean.width(), clean.height()), o.out / "mask" / (stems[i] + ".png"));
    }
  });

  const std::size_t nt = o.tasks.size();
  const std::size_t n = inputs.size() * nt;
  std::vector<std::optional<PairRecord>> records(n);
  std::vector<std::string> skip_reason(n);
  WebChainOptions web;
  web.prob = o.web_chain_prob;
  web.order = o.web_order;
  parallel_for(n, o.workers, [&](std::size_t k) {
    const std::size_t i = k / nt;
    const TaskKind task = o.tasks[k % nt];
    if (task == TaskKind::Haze && !has_depth[i]) {
      skip_reason[k] = stems[i] + "/haze: no depth sidecar";
      return;
    }
    const std::string clean_rel = "clean/" + stems[i] + ".png";
    const ImageBuffer clean = load_image(o.out / clean_rel);
    const auto side = detail::load_sidecar_copies(o.out, stems[i], clean.width(), clean.height());
    ApplyContext ctx;
    ctx.assets = &assets;
    ctx.depth = side.depth ? &*side.depth : nullptr;
    ctx.mask = side.mask ? &*side.mask : nullptr;
    ctx.base_dir = o.out;
    std::vector<std::string> sources;
    if (o.reflect_from_inputs)
      for (std::size_t j = 0; j < stems.size(); ++j)
        if (j != i) sources.push_back("clean/" + stems[j] + ".png");
    const SeedTree seed(o.seed, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(task_index(task))});
    Rng srng = seed.child(3).rng();
    const double severity = o.severity.draw(srng);
    SynthResult r = synthesize(clean, task, severity, map, seed, ctx, web, std::move(sources));
    const std::string deg_rel = detail::degraded_rel(task, stems[i]);
    detail::write_bytes_atomic(o.out / deg_rel, encode_png(r.image));
    records[k] = PairRecord{clean_rel, deg_rel, task, Severity(severity), seed, synth_params_to_json(r.params),
                            Origin::synthetic};
  });

  SynthRun run;
  for (std::size_t k = 0; k < n; ++k) {
    if (records[k]) run.manifest.records.push_back(std::move(*records[k]));
    else if (!skip_reason[k].empty()) run.skipped.push_back(skip_reason[k]);
  }
  for (const auto& s : run.skipped) log << "skip " << s << "\n";
  run.manifest.canonical_sort();
  run.manifest.config = synth_config_json(o);
  run.manifest.config["skipped"] = run.skipped.size();
  write_manifest(run.manifest, o.out / "manifest.jsonl");
  return run;
}

/// Regenerate every degraded image of `manifest_path` from its recorded
/// parameters into `out`, which may equal the manifest directory. Clean images,
/// sidecars and reflection sources resolve against the manifest directory.
inline Manifest run_replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out,
                           std::size_t workers, std::ostream& log) {
  Manifest m = read_manifest(manifest_path);
  const auto root = manifest_path.parent_path().empty() ? std::filesystem::path(".") : manifest_path.parent_path();
  std::map<PatternKind, std::filesystem::path> banks;
  if (m.config.contains("banks") && m.config["banks"].is_object())
    for (const auto& [k, v] : m.config["banks"].items()) banks[parse_pattern_kind(k)] = v.get<std::string>();
  const AssetLibrary assets = detail::load_assets(banks, log);
  parallel_for(m.records.size(), workers, [&](std::size_t k) {
    const PairRecord& r = m.records[k];
    if (r.origin != Origin::synthetic) return;
    const ImageBuffer clean = load_image(resolve_record_path(root, r.clean_path));
    const std::string stem = std::filesystem::path(r.clean_path).stem().string();
    const auto side = detail::load_sidecar_copies(root, stem, clean.width(), clean.height());
    ApplyContext ctx;
    ctx.assets = &assets;
    ctx.depth = side.depth ? &*side.depth : nullptr;
    ctx.mask = side.mask ? &*side.mask : nullptr;
    ctx.base_dir = root;
    const ImageBuffer img = apply_synth(clean, synth_params_from_json(r.params), r.seed, ctx);
    const auto dst = resolve_record_path(out, r.degraded_path);
    detail::ensure_dir(dst.parent_path());
    detail::write_bytes_atomic(dst, encode_png(img));
  });
  m.config["replay_of"] = manifest_path.string();
  return m;
}

}  // namespace degbench
