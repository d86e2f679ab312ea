#include "repdays/dtw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "repdays/error.hpp"

namespace repdays {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(std::span<const double> a, std::span<const double> b, std::optional<std::size_t> window) {
  if (a.empty() || b.empty()) throw ArgumentError("dtw: empty series");
  if (window) {
    const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    if (*window < diff) throw ArgumentError("dtw: window smaller than the length difference");
  }
}

bool outside_band(std::size_t i, std::size_t j, std::optional<std::size_t> window) {
  if (!window) return false;
  return (i > j ? i - j : j - i) > *window;
}

// Rolling-row layered DP. cost[j * S + d] holds the minimum summed cost of a
// path reaching (i, j) with d diagonal steps; S = min(la, lb).
double layered_dtw(const double* a, std::size_t la, const double* b, std::size_t lb,
                   std::optional<std::size_t> window, std::vector<double>& scratch) {
  const std::size_t stride = std::min(la, lb);
  scratch.assign(2 * lb * stride, kInf);
  double* prev = scratch.data();
  double* cur = scratch.data() + lb * stride;

  for (std::size_t i = 0; i < la; ++i) {
    std::fill(cur, cur + lb * stride, kInf);
    for (std::size_t j = 0; j < lb; ++j) {
      if (outside_band(i, j, window)) continue;
      const double c = std::abs(a[i] - b[j]);
      double* cell = cur + j * stride;
      if (i == 0 && j == 0) {
        cell[0] = c;
        continue;
      }
      const std::size_t dmax = std::min(i, j);
      const double* up = i > 0 ? prev + j * stride : nullptr;
      const double* left = j > 0 ? cur + (j - 1) * stride : nullptr;
      const double* diag = (i > 0 && j > 0) ? prev + (j - 1) * stride : nullptr;
      for (std::size_t d = 0; d <= dmax; ++d) {
        double best = kInf;
        if (up) best = up[d];
        if (left && left[d] < best) best = left[d];
        if (diag && d > 0 && diag[d - 1] < best) best = diag[d - 1];
        cell[d] = best + c;
      }
    }
    std::swap(prev, cur);
  }

  const double* last = prev + (lb - 1) * stride;
  double best = kInf;
  for (std::size_t d = 0; d < stride; ++d) {
    const double k = double(la + lb - 1 - d);
    best = std::min(best, last[d] / k);
  }
  return best;
}

void enumerate_paths(std::span<const double> a, std::span<const double> b, std::size_t i, std::size_t j,
                     double cost, std::size_t k, double& best) {
  cost += std::abs(a[i] - b[j]);
  ++k;
  if (i + 1 == a.size() && j + 1 == b.size()) {
    best = std::min(best, cost / double(k));
    return;
  }
  if (i + 1 < a.size()) enumerate_paths(a, b, i + 1, j, cost, k, best);
  if (j + 1 < b.size()) enumerate_paths(a, b, i, j + 1, cost, k, best);
  if (i + 1 < a.size() && j + 1 < b.size()) enumerate_paths(a, b, i + 1, j + 1, cost, k, best);
}

}  // namespace

double dtw_distance(std::span<const double> a, std::span<const double> b, std::optional<std::size_t> window) {
  check_inputs(a, b, window);
  thread_local std::vector<double> scratch;
  return layered_dtw(a.data(), a.size(), b.data(), b.size(), window, scratch);
}

Alignment dtw_align(std::span<const double> a, std::span<const double> b, std::optional<std::size_t> window) {
  check_inputs(a, b, window);
  const std::size_t la = a.size(), lb = b.size(), stride = std::min(la, lb);
  std::vector<double> table(la * lb * stride, kInf);
  auto at = [&](std::size_t i, std::size_t j, std::size_t d) -> double& { return table[(i * lb + j) * stride + d]; };

  for (std::size_t i = 0; i < la; ++i)
    for (std::size_t j = 0; j < lb; ++j) {
      if (outside_band(i, j, window)) continue;
      const double c = std::abs(a[i] - b[j]);
      if (i == 0 && j == 0) {
        at(0, 0, 0) = c;
        continue;
      }
      for (std::size_t d = 0; d <= std::min(i, j); ++d) {
        double best = kInf;
        if (i > 0) best = at(i - 1, j, d);
        if (j > 0) best = std::min(best, at(i, j - 1, d));
        if (i > 0 && j > 0 && d > 0) best = std::min(best, at(i - 1, j - 1, d - 1));
        at(i, j, d) = best + c;
      }
    }

  Alignment out;
  out.distance = kInf;
  std::size_t best_d = 0;
  for (std::size_t d = 0; d < stride; ++d) {
    const double r = at(la - 1, lb - 1, d) / double(la + lb - 1 - d);
    if (r < out.distance) {
      out.distance = r;
      best_d = d;
    }
  }

  // Walk back through predecessors whose stored cost reproduces the cell exactly.
  std::size_t i = la - 1, j = lb - 1, d = best_d;
  out.path.steps.emplace_back(i, j);
  while (i > 0 || j > 0) {
    const double here = at(i, j, d);
    const double c = std::abs(a[i] - b[j]);
    if (i > 0 && at(i - 1, j, d) + c == here) {
      --i;
    } else if (j > 0 && at(i, j - 1, d) + c == here) {
      --j;
    } else if (i > 0 && j > 0 && d > 0 && at(i - 1, j - 1, d - 1) + c == here) {
      --i, --j, --d;
    } else {
      throw std::logic_error("dtw_align: inconsistent DP table");
    }
    out.path.steps.emplace_back(i, j);
  }
  std::reverse(out.path.steps.begin(), out.path.steps.end());
  return out;
}

double brute_force_dtw(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("brute_force_dtw: empty series");
  if (a.size() > kBruteForceMaxLength || b.size() > kBruteForceMaxLength)
    throw ArgumentError("brute_force_dtw: series longer than " + std::to_string(kBruteForceMaxLength));
  double best = kInf;
  enumerate_paths(a, b, 0, 0, 0.0, 0, best);
  return best;
}

std::vector<double> resolve_weights(const DtwOptions& opts, std::size_t m) {
  if (opts.weights.empty()) return std::vector<double>(m, 1.0);
  if (opts.weights.size() != m)
    throw ArgumentError("dtw: " + std::to_string(opts.weights.size()) + " weights given for " +
                        std::to_string(m) + " variables");
  for (double w : opts.weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("dtw: weights must be finite and non-negative");
  return opts.weights;
}

double multivariate_dtw(const ProfileMatrix& a, const ProfileMatrix& b, const DtwOptions& opts) {
  if (a.vars() != b.vars()) throw ArgumentError("multivariate_dtw: variable count mismatch");
  const auto weights = resolve_weights(opts, a.vars());
  double total = 0.0;
  for (std::size_t v = 0; v < a.vars(); ++v) {
    if (weights[v] == 0.0) continue;
    const auto ca = a.column(v);
    const auto cb = b.column(v);
    total += weights[v] * dtw_distance(ca, cb, opts.window);
  }
  return total;
}

double multivariate_dtw(const DayProfile& a, const DayProfile& b, const DtwOptions& opts) {
  if (a.variable_names != b.variable_names) throw ArgumentError("multivariate_dtw: variable mismatch");
  return multivariate_dtw(a.matrix, b.matrix, opts);
}

DistanceMatrix distance_matrix(const Dataset& ds, const DtwOptions& opts, unsigned threads) {
  const std::size_t n = ds.size();
  if (n < 2) throw ArgumentError("distance_matrix: need at least 2 days");
  const std::size_t m = ds.num_vars();
  const auto weights = resolve_weights(opts, m);
  for (const auto& d : ds.days) {
    if (d.matrix.vars() != m) throw ArgumentError("distance_matrix: day with wrong variable count");
    if (d.matrix.hours() == 0 || d.matrix.hours() != ds.days.front().matrix.hours())
      throw ArgumentError("distance_matrix: days must share a non-zero number of hours");
  }

  // Column-major copies so each DTW call reads contiguous series.
  std::vector<std::vector<double>> columns(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t v = 0; v < m; ++v) columns[i * m + v] = ds.days[i].matrix.column(v);

  DistanceMatrix dm(n);
  std::atomic<std::size_t> next_row{0};
  auto worker = [&] {
    std::vector<double> scratch;
    for (std::size_t i = next_row++; i < n; i = next_row++) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double total = 0.0;
        for (std::size_t v = 0; v < m; ++v) {
          if (weights[v] == 0.0) continue;
          const auto& ca = columns[i * m + v];
          const auto& cb = columns[j * m + v];
          total += weights[v] * layered_dtw(ca.data(), ca.size(), cb.data(), cb.size(), opts.window, scratch);
        }
        dm.set(i, j, total);
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return dm;
}

}  // namespace repdays
