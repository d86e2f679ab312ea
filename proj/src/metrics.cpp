#include "repdays/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "repdays/error.hpp"

namespace repdays {

namespace {

void check_model(const Dataset& ds, const ClusterModel& model) {
  if (model.assignments.size() != ds.size())
    throw ArgumentError("model covers " + std::to_string(model.assignments.size()) + " days, dataset has " +
                        std::to_string(ds.size()));
  if (model.members.size() != model.k) throw ArgumentError("model membership lists do not match K");
  for (std::size_t a : model.assignments)
    if (a >= model.k) throw ArgumentError("day assigned to a cluster outside [0, K)");
}

void check_centroids(const ClusterModel& model) {
  if (model.centroids.size() != model.k) throw ArgumentError("model has no centroids; run compute_centroids first");
}

double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    const double d = a[e] - b[e];
    s += d * d;
  }
  return std::sqrt(s);
}

// Means of the flattened member vectors, independent of model.centroids.
std::vector<std::vector<double>> flat_means(const Dataset& ds, const ClusterModel& model) {
  const std::size_t dim = ds.days.front().matrix.flat().size();
  std::vector<std::vector<double>> means(model.k, std::vector<double>(dim, 0.0));
  for (std::size_t c = 0; c < model.k; ++c) {
    if (model.members[c].empty()) throw ArgumentError("empty cluster in model");
    for (std::size_t i : model.members[c]) {
      const auto x = ds.days[i].matrix.flat();
      for (std::size_t e = 0; e < dim; ++e) means[c][e] += x[e];
    }
    for (double& v : means[c]) v /= double(model.members[c].size());
  }
  return means;
}

void check_traditional_range(const Dataset& ds, const ClusterModel& model, std::size_t k_max, const char* name) {
  check_model(ds, model);
  if (model.k < 2 || model.k > k_max)
    throw ArgumentError(std::string(name) + ": K = " + std::to_string(model.k) + " outside [2, " +
                        std::to_string(k_max) + "]");
}

}  // namespace

std::vector<double> day_centroid_distances(const Dataset& ds, const ClusterModel& model, const DtwOptions& opts) {
  check_model(ds, model);
  check_centroids(model);
  const std::size_t n = ds.size(), k = model.k;
  std::vector<double> out(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c) out[i * k + c] = multivariate_dtw(ds.days[i].matrix, model.centroids[c], opts);
  return out;
}

namespace {

std::vector<double> ma_from(const ClusterModel& model, std::span<const double> dist) {
  std::vector<double> ma(model.assignments.size());
  for (std::size_t i = 0; i < ma.size(); ++i) ma[i] = dist[i * model.k + model.assignments[i]];
  return ma;
}

std::vector<double> mc_from(const ClusterModel& model, std::span<const double> dist) {
  if (model.k < 2) throw ArgumentError("MC undefined for a single cluster");
  std::vector<double> mc(model.assignments.size());
  for (std::size_t i = 0; i < mc.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model.k; ++c)
      if (c != model.assignments[i]) best = std::min(best, dist[i * model.k + c]);
    mc[i] = best;
  }
  return mc;
}

}  // namespace

std::vector<double> ma_scores(const Dataset& ds, const ClusterModel& model, const DtwOptions& opts) {
  return ma_from(model, day_centroid_distances(ds, model, opts));
}

std::vector<double> mc_scores(const Dataset& ds, const ClusterModel& model, const DtwOptions& opts) {
  if (model.k < 2) throw ArgumentError("MC undefined for a single cluster");
  return mc_from(model, day_centroid_distances(ds, model, opts));
}

double separation_score(std::span<const double> ma, std::span<const double> mc) {
  if (ma.size() != mc.size()) throw ArgumentError("separation_score: MA and MC differ in length");
  if (ma.empty()) throw ArgumentError("separation_score: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) sum += mc[i] - ma[i];
  return sum / double(ma.size());
}

double cohesion_score(std::span<const double> ma, const ClusterModel& model) {
  if (ma.size() != model.assignments.size()) throw ArgumentError("cohesion_score: MA does not match the model");
  double worst = 0.0;
  for (const auto& members : model.members) {
    for (std::size_t i : members)
      if (i >= ma.size()) throw ArgumentError("cohesion_score: member index out of range");
    double cluster_worst = 0.0;
    for (std::size_t i : members) cluster_worst = std::max(cluster_worst, ma[i]);
    worst = std::max(worst, cluster_worst);
  }
  return worst;
}

std::vector<double> euclidean_distances(const Dataset& ds) {
  const std::size_t n = ds.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euclid(ds.days[i].matrix.flat(), ds.days[j].matrix.flat());
      out[i * n + j] = d;
      out[j * n + i] = d;
    }
  return out;
}

double calinski_harabasz(const Dataset& ds, const ClusterModel& model) {
  check_traditional_range(ds, model, ds.size() - 1, "calinski_harabasz");
  const std::size_t n = ds.size(), k = model.k;
  const auto means = flat_means(ds, model);
  const std::size_t dim = means.front().size();
  std::vector<double> overall(dim, 0.0);
  for (const auto& d : ds.days) {
    const auto x = d.matrix.flat();
    for (std::size_t e = 0; e < dim; ++e) overall[e] += x[e];
  }
  for (double& v : overall) v /= double(n);

  double between = 0.0, within = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double d = euclid(means[c], overall);
    between += double(model.members[c].size()) * d * d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = euclid(ds.days[i].matrix.flat(), means[model.assignments[i]]);
    within += d * d;
  }
  if (within == 0.0) return 1.0;
  return (between / double(k - 1)) / (within / double(n - k));
}

double davies_bouldin(const Dataset& ds, const ClusterModel& model) {
  check_traditional_range(ds, model, ds.size(), "davies_bouldin");
  const std::size_t k = model.k;
  const auto means = flat_means(ds, model);
  std::vector<double> scatter(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i : model.members[c]) scatter[c] += euclid(ds.days[i].matrix.flat(), means[c]);
    scatter[c] /= double(model.members[c].size());
  }
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    double worst = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      const double sep = euclid(means[a], means[b]);
      const double r = sep == 0.0 ? 0.0 : (scatter[a] + scatter[b]) / sep;
      worst = std::max(worst, r);
    }
    total += worst;
  }
  return total / double(k);
}

double silhouette(const ClusterModel& model, std::span<const double> euclidean) {
  const std::size_t n = model.assignments.size(), k = model.k;
  if (euclidean.size() != n * n) throw ArgumentError("silhouette: distance matrix does not match the model");
  if (k < 2 || k + 1 > n) throw ArgumentError("silhouette: K = " + std::to_string(k) + " outside [2, N-1]");
  std::vector<double> sums(k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = model.assignments[i];
    const std::size_t own_size = model.members[own].size();
    if (own_size == 1) continue;  // singleton scores 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) sums[model.assignments[j]] += euclidean[i * n + j];
    const double a = sums[own] / double(own_size - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != own) b = std::min(b, sums[c] / double(model.members[c].size()));
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / double(n);
}

double silhouette(const Dataset& ds, const ClusterModel& model) {
  check_traditional_range(ds, model, ds.size() - 1, "silhouette");
  return silhouette(model, euclidean_distances(ds));
}

ValidationReport validate(const Dataset& ds, const ClusterModel& model, const DtwOptions& opts,
                          std::span<const double> euclidean) {
  check_model(ds, model);
  check_centroids(model);
  if (model.k < 2) throw ArgumentError("MC undefined for a single cluster");
  const auto dist = day_centroid_distances(ds, model, opts);

  ValidationReport r;
  r.method = model.method;
  r.k = model.k;
  r.ma = ma_from(model, dist);
  r.mc = mc_from(model, dist);
  r.ss = separation_score(r.ma, r.mc);
  r.cs = cohesion_score(r.ma, model);

  const std::size_t n = ds.size();
  r.db = davies_bouldin(ds, model);
  if (model.k + 1 <= n) {
    r.ch = calinski_harabasz(ds, model);
    if (euclidean.empty()) {
      r.silhouette = silhouette(model, euclidean_distances(ds));
    } else {
      r.silhouette = silhouette(model, euclidean);
    }
  }
  return r;
}

MetricSweep sweep(const Dataset& ds, const DistanceMatrix& dm, const SweepOptions& opts) {
  const std::size_t n = ds.size();
  if (dm.size() != n) throw ArgumentError("sweep: distance matrix does not match dataset");
  if (opts.k_min < 2 || opts.k_max + 1 > n || opts.k_min > opts.k_max)
    throw ArgumentError("sweep: K range " + std::to_string(opts.k_min) + ".." + std::to_string(opts.k_max) +
                        " not within [2, " + std::to_string(n - 1) + "]");
  if (opts.methods.empty()) throw ArgumentError("sweep: no methods given");

  MetricSweep out;
  std::vector<std::optional<MergeHistory>> hierarchies(opts.methods.size());
  for (std::size_t m = 0; m < opts.methods.size(); ++m)
    if (auto linkage = linkage_of(opts.methods[m])) {
      hierarchies[m] = ahc(dm, *linkage);
      ++out.hierarchy_builds;
    }
  const auto euclidean = euclidean_distances(ds);

  const std::size_t per_method = opts.k_max - opts.k_min + 1;
  out.rows.resize(opts.methods.size() * per_method);
  for (std::size_t m = 0; m < opts.methods.size(); ++m) {
    if (opts.methods[m] == Method::KMeans) out.kmeans_fits += per_method;
    for (std::size_t s = 0; s < per_method; ++s) {
      out.rows[m * per_method + s].method = opts.methods[m];
      out.rows[m * per_method + s].k = opts.k_min + s;
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < out.rows.size(); t = next++) {
      SweepRow& row = out.rows[t];
      const std::size_t m = t / per_method;
      try {
        ClusterModel model;
        if (hierarchies[m]) {
          model = cut(*hierarchies[m], row.k);
          attach_centroids(model, ds);
        } else {
          model = kmeans(ds, row.k, opts.kmeans);
        }
        const auto report = validate(ds, model, opts.dtw, euclidean);
        row.ss = report.ss;
        row.cs = report.cs;
        row.ch = report.ch;
        row.db = report.db;
        row.silhouette = report.silhouette;
        row.min_cluster_size = n;
        for (const auto& members : model.members) row.min_cluster_size = std::min(row.min_cluster_size, members.size());
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };

  unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
  threads = unsigned(std::min<std::size_t>(threads, out.rows.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * double(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("spearman: need two equal-length series of size >= 2");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = double(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace repdays
