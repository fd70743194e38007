#pragma once

// Line-by-line reading of JSON Lines files with located error messages.

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "degbench/core/error.hpp"

namespace degbench {

/// Calls fn(json) for each non-blank line. JSON errors become format errors;
/// errors thrown by fn keep their kind and gain the file position.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::format, where + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    }
  }
}

}  // namespace degbench
