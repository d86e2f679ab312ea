#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repdays/dataset.hpp"
#include "repdays/dtw.hpp"

namespace repdays {

enum class Linkage { Complete, Average };
enum class Method { KMeans, AhcComplete, AhcAverage };

std::string to_string(Linkage l);
std::string to_string(Method m);
Linkage linkage_from_string(const std::string& s);
/// Accepts "kmeans", "ahc-complete", "ahc-average".
Method method_from_string(const std::string& s);
Method method_for(Linkage l);
std::optional<Linkage> linkage_of(Method m);

/// Cluster ids follow the usual dendrogram convention: leaves are 0..n-1 and
/// the cluster created by merge s (0-based) gets id n + s.
struct Merge {
  std::size_t left = 0;   // smaller of the two merged ids
  std::size_t right = 0;  // larger of the two merged ids
  double distance = 0.0;  // linkage value at the time of the merge
  std::size_t id = 0;
  std::size_t size = 0;   // number of days in the new cluster

  bool operator==(const Merge&) const = default;
};

struct MergeHistory {
  std::size_t n = 0;
  Linkage linkage = Linkage::Average;
  std::vector<Merge> merges;  // n - 1 entries

  bool operator==(const MergeHistory&) const = default;
};

/// Agglomerative clustering on a precomputed distance matrix.
///
/// Linkage values are maintained with Lance-Williams updates: the running max
/// for complete linkage, and the running sum of cross-pair distances for
/// average linkage (the mean is formed as sum / (|A| |B|) when compared).
/// Ties on distance go to the pair with the lowest smaller id, then the lowest
/// larger id.
MergeHistory ahc(const DistanceMatrix& dm, Linkage linkage);

struct ModelParams {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> restarts;
  std::optional<double> inertia;
  std::optional<std::size_t> iterations;
  /// Inertia after each Lloyd update of the selected restart.
  std::vector<double> inertia_trace;

  bool operator==(const ModelParams&) const = default;
};

/// Clusters are indexed 0..K-1 in code and numbered 1..K in every file or
/// report a user sees. Cluster indices are ordered by the smallest day index
/// they contain.
struct ClusterModel {
  std::size_t k = 0;
  Method method = Method::AhcAverage;
  std::vector<std::size_t> assignments;         // day -> cluster index
  std::vector<std::vector<std::size_t>> members; // ascending day indices
  std::vector<ProfileMatrix> centroids;         // empty until compute_centroids runs
  ModelParams params;

  std::size_t num_days() const noexcept { return assignments.size(); }
  bool operator==(const ClusterModel&) const = default;
};

/// Undoes the last K-1 merges. Centroids are left empty.
ClusterModel cut(const MergeHistory& history, std::size_t k);

/// Builds a model from a raw labelling (any integer labels); clusters are
/// renumbered by first member and centroids are filled in from `ds`.
ClusterModel make_model(const Dataset& ds, std::span<const std::size_t> labels, Method method);

/// Element-wise mean of member day matrices, one per membership list.
std::vector<ProfileMatrix> compute_centroids(const Dataset& ds,
                                             const std::vector<std::vector<std::size_t>>& members);

/// Fills `model.centroids` from `ds`.
void attach_centroids(ClusterModel& model, const Dataset& ds);

/// AHC followed by cut and centroid computation.
ClusterModel fit_ahc(const Dataset& ds, const DistanceMatrix& dm, Linkage linkage, std::size_t k);

struct KMeansOptions {
  std::uint64_t seed = 42;
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
};

/// Euclidean k-means on days flattened to 24*m vectors: k-means++ seeding,
/// Lloyd iterations to a fixpoint (or max_iterations), best of `restarts` by
/// inertia (ties keep the earlier restart). An empty cluster takes the point
/// farthest from its current centroid.
ClusterModel kmeans(const Dataset& ds, std::size_t k, const KMeansOptions& opts = {});

/// Sum of squared Euclidean distances of days to their cluster centroid.
double inertia(const Dataset& ds, const ClusterModel& model);

/// Member minimizing the summed distance to all other members; ties go to the
/// lowest day index.
std::size_t medoid(const DistanceMatrix& dm, std::span<const std::size_t> members);

}  // namespace repdays
