#pragma once

// Restoration score composition, per-task and overall aggregation, and
// leaderboard emission.

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/task.hpp"

namespace degbench {

inline constexpr double kMinScore = 1.0;
inline constexpr double kMaxScore = 5.0;

/// FS = 0.2 (1 - lps) rs. Never clamped.
inline double final_score(double lps, double rs) {
  require(lps >= 0.0 && lps <= 1.0, ErrorKind::parameter, "lps must lie in [0,1]");
  return 0.2 * (1.0 - lps) * rs;
}

struct EvalRecord {
  std::string image_id;
  TaskKind task = TaskKind::Blur;
  double deg_score = kMinScore;
  double restored_score = kMinScore;
  double rs = 0.0;
  double lps = 0.0;
  double fs = 0.0;
};

inline EvalRecord make_eval_record(std::string id, TaskKind task, double deg_score, double restored_score, double lps) {
  EvalRecord r{std::move(id), task, deg_score, restored_score, restored_score - deg_score, lps, 0.0};
  r.fs = final_score(lps, r.rs);
  return r;
}

struct TaskReport {
  TaskKind task = TaskKind::Blur;
  std::size_t n = 0;
  double mean_lps = 0.0;
  double mean_rs = 0.0;
  double fs = 0.0;  // composed from the means
};

inline TaskReport make_task_report(TaskKind task, std::size_t n, double mean_lps, double mean_rs) {
  return {task, n, mean_lps, mean_rs, final_score(mean_lps, mean_rs)};
}

/// Average over task-level means; FS composed from the averaged LPS and RS.
struct OverallRow {
  std::size_t tasks = 0;
  double mean_lps = 0.0;
  double mean_rs = 0.0;
  double fs = 0.0;
};

struct MethodBoard {
  std::string method;
  std::vector<TaskReport> tasks;  // benchmark table order
  OverallRow overall;
  std::vector<std::string> warnings;
};

struct Leaderboard {
  std::vector<MethodBoard> methods;
};

/// Overall row from task-level reports. Absent tasks are omitted with a warning.
inline MethodBoard compose_board(std::string method, std::vector<TaskReport> reports) {
  MethodBoard b;
  b.method = std::move(method);
  std::map<TaskKind, TaskReport> by_task;
  for (const auto& r : reports) by_task[r.task] = r;
  for (TaskKind t : kTableOrder) {
    const auto it = by_task.find(t);
    if (it == by_task.end() || it->second.n == 0) {
      b.warnings.push_back("no records for task " + std::string(task_name(t)) + "; omitted from the overall row");
      continue;
    }
    b.tasks.push_back(it->second);
  }
  if (!b.tasks.empty()) {
    double lps = 0, rs = 0;
    for (const auto& r : b.tasks) lps += r.mean_lps, rs += r.mean_rs;
    const double n = static_cast<double>(b.tasks.size());
    b.overall = {b.tasks.size(), lps / n, rs / n, final_score(lps / n, rs / n)};
  }
  return b;
}

/// Per-task arithmetic means of LPS and RS, then the overall row.
inline MethodBoard aggregate(const std::vector<EvalRecord>& records, std::string method = "method") {
  require(!records.empty(), ErrorKind::parameter, "aggregate needs at least one record");
  std::map<TaskKind, std::pair<double, double>> sums;
  std::map<TaskKind, std::size_t> counts;
  for (const auto& r : records) {
    sums[r.task].first += r.lps;
    sums[r.task].second += r.rs;
    ++counts[r.task];
  }
  std::vector<TaskReport> reports;
  for (const auto& [task, s] : sums) {
    const double n = static_cast<double>(counts[task]);
    reports.push_back(make_task_report(task, counts[task], s.first / n, s.second / n));
  }
  return compose_board(std::move(method), std::move(reports));
}

/// Round half-even to `places` decimals, operating on the shortest decimal
/// representation of the value (so 0.2365 rounds to 0.236).
inline std::string format_half_even(double v, int places = 3) {
  require(std::isfinite(v), ErrorKind::parameter, "cannot format a non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string s(buf, res.ptr);
  bool neg = !s.empty() && s[0] == '-';
  if (neg) s.erase(0, 1);
  const auto dot = s.find('.');
  std::string ip = dot == std::string::npos ? s : s.substr(0, dot);
  std::string fp = dot == std::string::npos ? "" : s.substr(dot + 1);
  const auto P = static_cast<std::size_t>(places);
  if (fp.size() > P) {
    const std::string rest = fp.substr(P);
    fp.resize(P);
    const char first = rest[0];
    const bool tail = rest.find_first_not_of('0', 1) != std::string::npos;
    std::string digits = ip + fp;
    const int last = digits.back() - '0';
    const bool up = first > '5' || (first == '5' && (tail || last % 2 == 1));
    if (up) {
      int i = static_cast<int>(digits.size()) - 1;
      for (; i >= 0; --i) {
        if (digits[static_cast<std::size_t>(i)] == '9') {
          digits[static_cast<std::size_t>(i)] = '0';
        } else {
          ++digits[static_cast<std::size_t>(i)];
          break;
        }
      }
      if (i < 0) digits.insert(digits.begin(), '1');
    }
    ip = digits.substr(0, digits.size() - P);
    fp = digits.substr(digits.size() - P);
  }
  fp.resize(P, '0');
  if (ip.empty()) ip = "0";
  std::string out = ip + (P > 0 ? "." + fp : "");
  if (neg && out.find_first_not_of("0.") != std::string::npos) out.insert(out.begin(), '-');
  return out;
}

inline double round_half_even(double v, int places = 3) { return std::stod(format_half_even(v, places)); }

enum class BoardFormat { csv, markdown };

inline BoardFormat parse_board_format(std::string_view s) {
  if (s == "csv") return BoardFormat::csv;
  if (s == "markdown" || s == "md") return BoardFormat::markdown;
  fail(ErrorKind::usage, "unknown leaderboard format '" + std::string(s) + "'");
}

inline constexpr std::string_view kOverallLabel = "avg_total";

/// CSV: one row per (method, task) plus an avg_total row; columns method,
/// task, lps, rs, fs. Markdown: one row per method, LPS/RS/FS per task.
inline std::string emit_leaderboard(const Leaderboard& board, BoardFormat format) {
  std::ostringstream out;
  auto cell = [](double v) { return format_half_even(v, 3); };
  if (format == BoardFormat::csv) {
    out << "method,task,lps,rs,fs\n";
    for (const auto& m : board.methods) {
      std::string name = m.method;
      if (name.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : name) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        name = q + "\"";
      }
      for (const auto& r : m.tasks)
        out << name << ',' << task_name(r.task) << ',' << cell(r.mean_lps) << ',' << cell(r.mean_rs) << ','
            << cell(r.fs) << '\n';
      if (m.overall.tasks > 0)
        out << name << ',' << kOverallLabel << ',' << cell(m.overall.mean_lps) << ',' << cell(m.overall.mean_rs)
            << ',' << cell(m.overall.fs) << '\n';
    }
    return out.str();
  }
  out << "| Method |";
  for (TaskKind t : kTableOrder) {
    const auto n = task_display_name(t);
    out << ' ' << n << " LPS↓ | " << n << " RS↑ | " << n << " FS↑ |";
  }
  out << " Avg Total LPS↓ | Avg Total RS↑ | Avg Total FS↑ |\n|---|";
  for (std::size_t i = 0; i < 3 * (kTableOrder.size() + 1); ++i) out << "---:|";
  out << '\n';
  for (const auto& m : board.methods) {
    std::string name = m.method;
    for (std::size_t p = 0; (p = name.find('|', p)) != std::string::npos; p += 2) name.replace(p, 1, "\\|");
    out << "| " << name << " |";
    for (TaskKind t : kTableOrder) {
      const TaskReport* r = nullptr;
      for (const auto& x : m.tasks)
        if (x.task == t) r = &x;
      if (r) out << ' ' << cell(r->mean_lps) << " | " << cell(r->mean_rs) << " | " << cell(r->fs) << " |";
      else out << " - | - | - |";
    }
    if (m.overall.tasks > 0)
      out << ' ' << cell(m.overall.mean_lps) << " | " << cell(m.overall.mean_rs) << " | " << cell(m.overall.fs) << " |";
    else
      out << " - | - | - |";
    out << '\n';
  }
  return out.str();
}

}  // namespace degbench
