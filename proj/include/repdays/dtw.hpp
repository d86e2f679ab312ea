#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "repdays/dataset.hpp"

namespace repdays {

/// Monotone alignment between two series, 0-based index pairs from (0,0)
/// to (len_a-1, len_b-1) using unit steps (1,0), (0,1), (1,1).
struct WarpingPath {
  std::vector<std::pair<std::size_t, std::size_t>> steps;
  std::size_t length() const noexcept { return steps.size(); }
};

struct Alignment {
  double distance = 0.0;
  WarpingPath path;
};

/// Time-normalized DTW: min over warping paths of (sum |a[i_s] - b[j_s]|) / k,
/// where k is the number of aligned pairs on the path.
///
/// Because the path length appears in the denominator, a cumulative-cost DP
/// does not minimize the ratio. The DP here is layered by the number of
/// diagonal steps d: a path to (i, j) with d diagonal steps has exactly
/// i + j - d + 1 pairs, so the best total cost per d gives the exact minimum.
///
/// `window` is a Sakoe-Chiba half-width (|i - j| <= window); it must be at
/// least |len(a) - len(b)|.
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    std::optional<std::size_t> window = std::nullopt);

/// Same as dtw_distance, also returning one optimal path. Among optimal paths
/// the one with the fewest diagonal steps is returned.
Alignment dtw_align(std::span<const double> a, std::span<const double> b,
                    std::optional<std::size_t> window = std::nullopt);

/// Longest series brute_force_dtw accepts.
inline constexpr std::size_t kBruteForceMaxLength = 8;

/// Enumerates every admissible path. Exponential; a test oracle only.
double brute_force_dtw(std::span<const double> a, std::span<const double> b);

struct DtwOptions {
  std::optional<std::size_t> window;
  /// Per-variable weights; empty means all ones.
  std::vector<double> weights;

  bool operator==(const DtwOptions&) const = default;
};

/// Weighted sum of per-variable DTW distances between two hours x vars matrices.
double multivariate_dtw(const ProfileMatrix& a, const ProfileMatrix& b, const DtwOptions& opts = {});

/// Day-level overload; the two days must carry the same variable names.
double multivariate_dtw(const DayProfile& a, const DayProfile& b, const DtwOptions& opts = {});

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  /// Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double d) {
    data_[i * n_ + j] = d;
    data_[j * n_ + i] = d;
  }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Pairwise multivariate DTW over all days. Only i < j is computed; the
/// lower triangle is mirrored. `threads == 0` picks the hardware concurrency.
DistanceMatrix distance_matrix(const Dataset& ds, const DtwOptions& opts = {}, unsigned threads = 0);

/// Resolved weights (fills in the all-ones default) validated against `m` variables.
std::vector<double> resolve_weights(const DtwOptions& opts, std::size_t m);

}  // namespace repdays
