#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "degbench/core/error.hpp"

namespace degbench {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream. Draw n is mix64(key + n * golden), so a
/// stream is fully addressed by its key and never depends on thread timing.
///
/// The distribution helpers are implemented here rather than taken from
/// <random> because the standard distributions are implementation-defined and
/// would break replay across toolchains.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do v = next_u64();
    while (v >= limit);
    return v % n;
  }

  int uniform_int(int lo, int hi) noexcept {  // inclusive
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller (no cached spare, so each call costs two draws).
  double normal() noexcept {
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double sigma) noexcept { return mean + sigma * normal(); }

  /// Poisson draw by Knuth's product method on chunks of mean <= 30.
  std::uint64_t poisson(double lambda) noexcept {
    std::uint64_t total = 0;
    while (lambda > 0.0) {
      const double chunk = std::min(lambda, 30.0);
      lambda -= chunk;
      const double limit = std::exp(-chunk);
      double prod = uniform();
      while (prod > limit) {
        ++total;
        prod *= uniform();
      }
    }
    return total;
  }

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Splittable seed address: a root seed plus a path of child indices.
/// Identical (root, path) pairs always yield identical streams.
class SeedTree {
 public:
  SeedTree() = default;
  explicit SeedTree(std::uint64_t root) : root_(root) {}
  SeedTree(std::uint64_t root, std::vector<std::uint32_t> path) : root_(root), path_(std::move(path)) {}

  std::uint64_t root() const noexcept { return root_; }
  const std::vector<std::uint32_t>& path() const noexcept { return path_; }

  SeedTree child(std::uint32_t index) const {
    SeedTree c = *this;
    c.path_.push_back(index);
    return c;
  }

  std::uint64_t key() const noexcept {
    std::uint64_t k = detail::mix64(root_ ^ 0x6A09E667F3BCC908ULL);
    std::uint64_t depth = 0;
    for (std::uint32_t i : path_) {
      ++depth;
      k = detail::mix64(k ^ detail::mix64((static_cast<std::uint64_t>(i) << 8 | (depth & 0xFF)) +
                                          detail::kGolden));
    }
    return k;
  }

  Rng rng() const noexcept { return Rng(key()); }

  /// "root/i/j/..." with the root in decimal.
  std::string to_string() const {
    std::string s = std::to_string(root_);
    for (std::uint32_t i : path_) {
      s += '/';
      s += std::to_string(i);
    }
    return s;
  }

  static SeedTree parse(std::string_view text) {
    SeedTree t;
    bool first = true;
    while (true) {
      const auto slash = text.find('/');
      const std::string_view part = text.substr(0, slash);
      require(!part.empty(), ErrorKind::format, "empty component in seed path");
      if (first) {
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), t.root_);
        require(ec == std::errc{} && p == part.data() + part.size(), ErrorKind::format,
                "bad seed root '" + std::string(part) + "'");
        first = false;
      } else {
        std::uint32_t idx = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
        require(ec == std::errc{} && p == part.data() + part.size(), ErrorKind::format,
                "bad seed path index '" + std::string(part) + "'");
        t.path_.push_back(idx);
      }
      if (slash == std::string_view::npos) break;
      text.remove_prefix(slash + 1);
    }
    return t;
  }

  friend bool operator==(const SeedTree&, const SeedTree&) = default;

 private:
  std::uint64_t root_ = 0;
  std::vector<std::uint32_t> path_;
};

}  // namespace degbench
