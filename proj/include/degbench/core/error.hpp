#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace degbench {

// Failure categories. Each maps onto one CLI exit code (see exit_code()).
enum class ErrorKind {
  usage,        // bad invocation or configuration
  io,           // unreadable/unwritable file, truncated stream
  format,       // undecodable or malformed content
  parameter,    // argument outside its documented range
  shape,        // dimension mismatch between buffers
  config,       // missing configuration entry
  lookup,       // id absent from an ingested table
  unsupported,  // operation not defined for the requested task
  bank,         // pattern bank has no usable entries
  undefined,    // statistic undefined for the input (e.g. zero variance)
  external,     // external backend failure
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::shape: return "shape";
    case ErrorKind::config: return "config";
    case ErrorKind::lookup: return "lookup";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::bank: return "bank";
    case ErrorKind::undefined: return "undefined";
    case ErrorKind::external: return "external";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// 0 ok, 2 usage, 3 I/O, 4 data/format, 5 backend.
inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::usage: return 2;
    case ErrorKind::io: return 3;
    case ErrorKind::external: return 5;
    default: return 4;
  }
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace degbench
