#pragma once

// Rank and linear correlation coefficients with tie handling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "degbench/core/error.hpp"

namespace degbench {

struct Correlations {
  double kendall_tau_b = 0.0;
  double srcc = 0.0;
  double plcc = 0.0;
};

namespace detail {

inline void check_pair(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::parameter, "correlation inputs differ in length");
  require(x.size() >= 2, ErrorKind::parameter, "correlation needs at least two samples");
}

/// Sum of t(t-1)/2 over runs of equal values in a sorted sequence.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0, run = 1;
  for (It it = first; it != last; ++it) {
    if (it + 1 != last && eq(*it, *(it + 1))) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

/// Number of inversions in v (stable merge sort), v is sorted on return.
inline std::int64_t count_inversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size()), hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    std::swap(v, buf);
  }
  return swaps;
}

}  // namespace detail

/// Pearson linear correlation.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0 && syy > 0.0, ErrorKind::undefined, "correlation undefined for zero-variance input");
  return sxy / std::sqrt(sxx * syy);
}

/// 1-based ranks, ties receive the average of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

/// Spearman rank correlation: Pearson of average ranks.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const auto rx = average_ranks(x), ry = average_ranks(y);
  return pearson(rx, ry);
}

/// Kendall tau-b with tie correction, O(n log n) (Knight's algorithm).
inline double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = {x[i], y[i]};
  std::sort(p.begin(), p.end());
  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 = detail::tied_pairs(p.begin(), p.end(), [](auto& a, auto& b) { return a.first == b.first; });
  const std::int64_t n3 = detail::tied_pairs(p.begin(), p.end(), [](auto& a, auto& b) { return a == b; });
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = p[i].second;
  const std::int64_t swaps = detail::count_inversions(ys);
  const std::int64_t n2 = detail::tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });
  require(n0 - n1 > 0 && n0 - n2 > 0, ErrorKind::undefined, "correlation undefined for zero-variance input");
  const auto num = static_cast<double>(n0 - n1 - n2 + n3 - 2 * swaps);
  return num / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

inline Correlations rank_correlations(std::span<const double> x, std::span<const double> y) {
  return {kendall_tau_b(x, y), spearman(x, y), pearson(x, y)};
}

}  // namespace degbench
