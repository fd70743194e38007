#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <tuple>
#include <string>
#include <string_view>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/core/task.hpp"

namespace degbench {

inline constexpr std::string_view kToolVersion = "degbench 0.3.0";

/// Provenance of one clean/degraded pair. `params` together with the clean
/// image and `seed` fully determine the degraded image.
struct PairRecord {
  std::string clean_path;
  std::string degraded_path;
  TaskKind task = TaskKind::Blur;
  Severity severity;
  SeedTree seed;
  nlohmann::json params = nlohmann::json::object();
  Origin origin = Origin::synthetic;

  /// Records are identified by their degraded path.
  const std::string& id() const noexcept { return degraded_path; }
};

inline constexpr std::array<std::string_view, 7> kRecordKeys = {
    "clean_path", "degraded_path", "task", "severity", "seed_path", "params", "origin"};

inline nlohmann::ordered_json record_to_json(const PairRecord& r) {
  nlohmann::ordered_json j;
  j["clean_path"] = r.clean_path;
  j["degraded_path"] = r.degraded_path;
  j["task"] = task_name(r.task);
  j["severity"] = r.severity.value();
  j["seed_path"] = r.seed.to_string();
  j["params"] = r.params;
  j["origin"] = origin_name(r.origin);
  return j;
}

inline PairRecord record_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorKind::format, "manifest line is not a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    require(std::find(kRecordKeys.begin(), kRecordKeys.end(), it.key()) != kRecordKeys.end(),
            ErrorKind::format, "unexpected manifest key '" + it.key() + "'");
  for (auto key : kRecordKeys)
    require(j.contains(std::string(key)), ErrorKind::format,
            "manifest record is missing key '" + std::string(key) + "'");
  try {
    PairRecord r;
    r.clean_path = j.at("clean_path").get<std::string>();
    r.degraded_path = j.at("degraded_path").get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.severity = Severity(j.at("severity").get<double>());
    r.seed = SeedTree::parse(j.at("seed_path").get<std::string>());
    r.params = j.at("params");
    r.origin = parse_origin(j.at("origin").get<std::string>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, std::string("bad manifest record: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parameter) fail(ErrorKind::format, e.what());
    throw;
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Manifest {
  std::vector<PairRecord> records;
  std::string created = utc_timestamp();
  std::string tool_version = std::string(kToolVersion);
  /// Effective run configuration echoed by the command that wrote the manifest.
  nlohmann::json config = nlohmann::json::object();

  /// Throws if two records share a degraded path.
  void validate() const {
    std::set<std::string_view> seen;
    for (const auto& r : records)
      require(seen.insert(r.degraded_path).second, ErrorKind::format,
              "duplicate record path '" + r.degraded_path + "'");
  }

  void canonical_sort() {
    std::sort(records.begin(), records.end(), [](const PairRecord& a, const PairRecord& b) {
      return std::tie(a.degraded_path, a.clean_path) < std::tie(b.degraded_path, b.clean_path);
    });
  }
};

/// JSON Lines body of a manifest (records only, one per line).
inline std::string manifest_to_jsonl(const Manifest& m) {
  std::string out;
  for (const auto& r : m.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

inline std::filesystem::path manifest_meta_path(const std::filesystem::path& manifest) {
  return std::filesystem::path(manifest.string() + ".meta.json");
}

/// Write `text` to `path` through a sibling temporary and a rename, so
/// readers never observe a partially written file.
inline void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::io, "cannot open '" + tmp.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorKind::io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorKind::io, "cannot rename '" + tmp.string() + "': " + ec.message());
}

/// Records go to `path` as JSON Lines; created/tool_version/config go to the
/// `<path>.meta.json` sidecar so record lines keep exactly the seven record keys.
inline void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  m.validate();
  nlohmann::ordered_json meta;
  meta["created"] = m.created;
  meta["tool_version"] = m.tool_version;
  meta["records"] = m.records.size();
  meta["config"] = m.config;
  write_text_atomic(manifest_meta_path(path), meta.dump(2) + "\n");
  write_text_atomic(path, manifest_to_jsonl(m));
}

inline Manifest parse_manifest_jsonl(std::istream& in, const std::string& name) {
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::format, name + ":" + std::to_string(lineno) + ": " + e.what());
    }
    m.records.push_back(record_from_json(j));
  }
  return m;
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open manifest '" + path.string() + "'");
  Manifest m = parse_manifest_jsonl(in, path.string());
  const auto meta_path = manifest_meta_path(path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream meta_in(meta_path);
    try {
      const auto meta = nlohmann::json::parse(meta_in);
      m.created = meta.value("created", m.created);
      m.tool_version = meta.value("tool_version", m.tool_version);
      if (meta.contains("config")) m.config = meta["config"];
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::format, meta_path.string() + ": " + e.what());
    }
  }
  m.validate();
  return m;
}

/// Resolve a record path: relative paths are relative to the manifest directory.
inline std::filesystem::path resolve_record_path(const std::filesystem::path& manifest_dir, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : manifest_dir / path;
}

struct OriginCounts {
  std::uint64_t synthetic = 0;
  std::uint64_t real = 0;
  std::uint64_t total() const noexcept { return synthetic + real; }
  friend bool operator==(const OriginCounts&, const OriginCounts&) = default;
};

struct DatasetStats {
  std::array<OriginCounts, 9> per_task{};
  OriginCounts totals;

  void add(TaskKind task, Origin origin, std::uint64_t n = 1) {
    auto& c = per_task[task_index(task)];
    (origin == Origin::synthetic ? c.synthetic : c.real) += n;
    (origin == Origin::synthetic ? totals.synthetic : totals.real) += n;
  }
  const OriginCounts& operator[](TaskKind t) const { return per_task[task_index(t)]; }

  DatasetStats& operator+=(const DatasetStats& o) {
    for (std::size_t i = 0; i < per_task.size(); ++i) {
      per_task[i].synthetic += o.per_task[i].synthetic;
      per_task[i].real += o.per_task[i].real;
    }
    totals.synthetic += o.totals.synthetic;
    totals.real += o.totals.real;
    return *this;
  }
  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

inline DatasetStats dataset_stats(const Manifest& m) {
  DatasetStats s;
  for (const auto& r : m.records) s.add(r.task, r.origin);
  return s;
}

}  // namespace degbench
