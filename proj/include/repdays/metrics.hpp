#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repdays/clustering.hpp"
#include "repdays/dataset.hpp"
#include "repdays/dtw.hpp"

namespace repdays {

/// DTW distance of every day to every centroid (N x K, row-major).
std::vector<double> day_centroid_distances(const Dataset& ds, const ClusterModel& model,
                                           const DtwOptions& opts = {});

/// MA_i: DTW distance of day i to its own cluster centroid.
std::vector<double> ma_scores(const Dataset& ds, const ClusterModel& model, const DtwOptions& opts = {});

/// MC_i: smallest DTW distance of day i to a centroid of any other cluster.
/// Needs K >= 2.
std::vector<double> mc_scores(const Dataset& ds, const ClusterModel& model, const DtwOptions& opts = {});

/// Mean of (MC_i - MA_i). Not clamped; negative when days sit closer to a foreign centroid.
double separation_score(std::span<const double> ma, std::span<const double> mc);

/// Worst MA over all clusters and members.
double cohesion_score(std::span<const double> ma, const ClusterModel& model);

/// Pairwise Euclidean distances between days flattened to 24*m vectors (N x N, row-major).
std::vector<double> euclidean_distances(const Dataset& ds);

/// Calinski-Harabasz on flattened days. Needs 2 <= K <= N-1. Returns 1 when
/// the within-cluster dispersion is zero.
double calinski_harabasz(const Dataset& ds, const ClusterModel& model);

/// Davies-Bouldin on flattened days. Needs 2 <= K <= N. Pairs of clusters
/// with coincident centroids contribute 0.
double davies_bouldin(const Dataset& ds, const ClusterModel& model);

/// Mean silhouette on flattened days; singleton members score 0. Needs 2 <= K <= N-1.
double silhouette(const Dataset& ds, const ClusterModel& model);
/// Same, reusing a precomputed euclidean_distances() matrix.
double silhouette(const ClusterModel& model, std::span<const double> euclidean);

struct ValidationReport {
  Method method = Method::AhcAverage;
  std::size_t k = 0;
  std::vector<double> ma;
  std::vector<double> mc;
  double ss = 0.0;
  double cs = 0.0;
  /// Unset where K is outside the index's domain.
  std::optional<double> ch;
  std::optional<double> db;
  std::optional<double> silhouette;

  bool operator==(const ValidationReport&) const = default;
};

/// All seven scores for one clustering. Requires centroids and K >= 2.
ValidationReport validate(const Dataset& ds, const ClusterModel& model, const DtwOptions& opts = {},
                          std::span<const double> euclidean = {});

struct SweepRow {
  Method method = Method::AhcAverage;
  std::size_t k = 0;
  bool ok = true;
  std::string error;  // set when ok is false
  double ss = 0.0;
  double cs = 0.0;
  std::optional<double> ch;
  std::optional<double> db;
  std::optional<double> silhouette;
  /// Size of the smallest cluster of the fitted model.
  std::size_t min_cluster_size = 0;

  bool operator==(const SweepRow&) const = default;
};

struct MetricSweep {
  std::vector<SweepRow> rows;  // method-major, K ascending
  /// Number of AHC hierarchies built and k-means fits run.
  std::size_t hierarchy_builds = 0;
  std::size_t kmeans_fits = 0;

  bool operator==(const MetricSweep&) const = default;
};

struct SweepOptions {
  std::vector<Method> methods{Method::KMeans, Method::AhcComplete, Method::AhcAverage};
  std::size_t k_min = 2;
  std::size_t k_max = 20;
  KMeansOptions kmeans;
  DtwOptions dtw;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Fits every (method, K) pair and scores it. One hierarchy per AHC linkage
/// is reused across all cuts. A row whose fit fails is flagged and the sweep
/// continues.
MetricSweep sweep(const Dataset& ds, const DistanceMatrix& dm, const SweepOptions& opts);

/// Spearman rank correlation (average ranks for ties). NaN when a side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace repdays
