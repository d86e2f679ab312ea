#include "repdays/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "repdays/error.hpp"
#include "repdays/rng.hpp"

namespace repdays {

std::string to_string(Linkage l) { return l == Linkage::Complete ? "complete" : "average"; }

std::string to_string(Method m) {
  switch (m) {
    case Method::KMeans: return "kmeans";
    case Method::AhcComplete: return "ahc-complete";
    case Method::AhcAverage: return "ahc-average";
  }
  return "unknown";
}

Linkage linkage_from_string(const std::string& s) {
  if (s == "complete") return Linkage::Complete;
  if (s == "average") return Linkage::Average;
  throw ArgumentError("unknown linkage '" + s + "' (expected complete or average)");
}

Method method_from_string(const std::string& s) {
  if (s == "kmeans") return Method::KMeans;
  if (s == "ahc-complete") return Method::AhcComplete;
  if (s == "ahc-average") return Method::AhcAverage;
  throw ArgumentError("unknown method '" + s + "' (expected kmeans, ahc-complete or ahc-average)");
}

Method method_for(Linkage l) { return l == Linkage::Complete ? Method::AhcComplete : Method::AhcAverage; }

std::optional<Linkage> linkage_of(Method m) {
  switch (m) {
    case Method::AhcComplete: return Linkage::Complete;
    case Method::AhcAverage: return Linkage::Average;
    case Method::KMeans: return std::nullopt;
  }
  return std::nullopt;
}

MergeHistory ahc(const DistanceMatrix& dm, Linkage linkage) {
  const std::size_t n = dm.size();
  if (n < 2) throw ArgumentError("ahc: need at least 2 days");

  // Slot s starts as leaf s; a merge reuses the slot of the smaller id.
  // For average linkage `value` holds cross-pair sums, otherwise maxima.
  std::vector<double> value(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) value[i * n + j] = dm(i, j);
  std::vector<std::size_t> id(n), size(n, 1);
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);

  auto linkage_value = [&](std::size_t a, std::size_t b) {
    const double v = value[a * n + b];
    return linkage == Linkage::Average ? v / (double(size[a]) * double(size[b])) : v;
  };

  MergeHistory history{n, linkage, {}};
  history.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_lo = 0, best_hi = 0, slot_a = 0, slot_b = 0;
    bool found = false;
    for (std::size_t x = 0; x < active.size(); ++x) {
      const std::size_t a = active[x];
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const std::size_t b = active[y];
        const double d = linkage_value(a, b);
        const std::size_t lo = std::min(id[a], id[b]), hi = std::max(id[a], id[b]);
        if (!found || std::tie(d, lo, hi) < std::tie(best, best_lo, best_hi)) {
          found = true;
          best = d;
          best_lo = lo;
          best_hi = hi;
          slot_a = a;
          slot_b = b;
        }
      }
    }
    if (id[slot_a] > id[slot_b]) std::swap(slot_a, slot_b);

    for (std::size_t k : active) {
      if (k == slot_a || k == slot_b) continue;
      double& ak = value[slot_a * n + k];
      const double bk = value[slot_b * n + k];
      ak = linkage == Linkage::Average ? ak + bk : std::max(ak, bk);
      value[k * n + slot_a] = ak;
    }
    const std::size_t new_id = n + step;
    history.merges.push_back({best_lo, best_hi, best, new_id, size[slot_a] + size[slot_b]});
    size[slot_a] += size[slot_b];
    id[slot_a] = new_id;
    active.erase(std::find(active.begin(), active.end(), slot_b));
  }
  return history;
}

namespace {

// Relabels arbitrary labels so cluster indices follow first-member order.
ClusterModel model_from_labels(std::span<const std::size_t> labels, Method method) {
  ClusterModel model;
  model.method = method;
  model.assignments.resize(labels.size());
  std::vector<std::pair<std::size_t, std::size_t>> remap;  // (label, index)
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find_if(remap.begin(), remap.end(), [&](const auto& p) { return p.first == labels[i]; });
    std::size_t c;
    if (it == remap.end()) {
      c = remap.size();
      remap.emplace_back(labels[i], c);
      model.members.emplace_back();
    } else {
      c = it->second;
    }
    model.assignments[i] = c;
    model.members[c].push_back(i);
  }
  model.k = model.members.size();
  return model;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

ClusterModel cut(const MergeHistory& history, std::size_t k) {
  const std::size_t n = history.n;
  if (k < 1 || k > n) throw ArgumentError("cut: K must lie in [1, " + std::to_string(n) + "]");
  if (history.merges.size() + 1 != n) throw ArgumentError("cut: merge history is incomplete");

  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t s = 0; s < n - k; ++s) {
    const auto& m = history.merges[s];
    parent[find_root(parent, m.left)] = m.id;
    parent[find_root(parent, m.right)] = m.id;
  }
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = find_root(parent, i);
  return model_from_labels(labels, method_for(history.linkage));
}

std::vector<ProfileMatrix> compute_centroids(const Dataset& ds,
                                             const std::vector<std::vector<std::size_t>>& members) {
  std::vector<ProfileMatrix> out;
  out.reserve(members.size());
  for (const auto& list : members) {
    if (list.empty()) throw ArgumentError("compute_centroids: empty membership list");
    const auto& first = ds.days.at(list.front()).matrix;
    ProfileMatrix c(first.hours(), first.vars());
    auto acc = c.flat();
    for (std::size_t i : list) {
      const auto x = ds.days.at(i).matrix.flat();
      if (x.size() != acc.size()) throw ArgumentError("compute_centroids: days differ in shape");
      for (std::size_t e = 0; e < acc.size(); ++e) acc[e] += x[e];
    }
    for (double& v : acc) v /= double(list.size());
    out.push_back(std::move(c));
  }
  return out;
}

void attach_centroids(ClusterModel& model, const Dataset& ds) {
  if (model.num_days() != ds.size()) throw ArgumentError("model and dataset disagree on the number of days");
  model.centroids = compute_centroids(ds, model.members);
}

ClusterModel make_model(const Dataset& ds, std::span<const std::size_t> labels, Method method) {
  if (labels.size() != ds.size()) throw ArgumentError("make_model: one label per day required");
  auto model = model_from_labels(labels, method);
  attach_centroids(model, ds);
  return model;
}

ClusterModel fit_ahc(const Dataset& ds, const DistanceMatrix& dm, Linkage linkage, std::size_t k) {
  if (dm.size() != ds.size()) throw ArgumentError("fit_ahc: distance matrix does not match dataset");
  auto model = cut(ahc(dm, linkage), k);
  attach_centroids(model, ds);
  return model;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    const double d = a[e] - b[e];
    s += d * d;
  }
  return s;
}

struct LloydRun {
  std::vector<std::size_t> labels;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

using Points = std::vector<std::span<const double>>;

std::vector<std::vector<double>> seed_plus_plus(const Points& pts, std::size_t k, Rng& rng) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> centers;
  std::vector<bool> chosen(n, false);
  std::size_t first = rng.index(n);
  chosen[first] = true;
  centers.emplace_back(pts[first].begin(), pts[first].end());

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(pts[i], centers[0]);
  while (centers.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (d2[i] > 0.0 && cum > r) {
          pick = i;
          break;
        }
      }
      if (pick == n)  // r landed on the rounding slack at the end
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    chosen[pick] = true;
    centers.emplace_back(pts[pick].begin(), pts[pick].end());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(pts[i], centers.back()));
  }
  return centers;
}

LloydRun lloyd(const Points& pts, std::vector<std::vector<double>> centers, std::size_t max_iterations) {
  const std::size_t n = pts.size(), k = centers.size(), dim = pts.front().size();
  LloydRun run;
  run.labels.assign(n, k);  // k = unassigned
  std::vector<double> cost(n);

  for (std::size_t it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(pts[i], centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(pts[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.labels[i] != best) changed = true;
      run.labels[i] = best;
      cost[i] = best_d;
    }

    std::vector<std::size_t> counts(k, 0);
    for (std::size_t l : run.labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i)
        if (counts[run.labels[i]] > 1 && (far == n || cost[i] > cost[far])) far = i;
      if (far == n) throw ArgumentError("kmeans: cannot repair an empty cluster");
      --counts[run.labels[far]];
      run.labels[far] = c;
      counts[c] = 1;
      cost[far] = 0.0;
      changed = true;
    }

    if (!changed && it > 0) break;
    ++run.iterations;

    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t e = 0; e < dim; ++e) centers[run.labels[i]][e] += pts[i][e];
    for (std::size_t c = 0; c < k; ++c)
      for (double& v : centers[c]) v /= double(counts[c]);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += squared_distance(pts[i], centers[run.labels[i]]);
    run.trace.push_back(total);
  }
  run.inertia = run.trace.empty() ? 0.0 : run.trace.back();
  return run;
}

}  // namespace

ClusterModel kmeans(const Dataset& ds, std::size_t k, const KMeansOptions& opts) {
  const std::size_t n = ds.size();
  if (k < 2) throw ArgumentError("kmeans: K must be at least 2");
  if (k > n) throw ArgumentError("kmeans: K = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " days");
  if (opts.restarts < 1) throw ArgumentError("kmeans: restarts must be at least 1");
  if (opts.max_iterations < 1) throw ArgumentError("kmeans: max_iterations must be at least 1");

  Points pts;
  pts.reserve(n);
  for (const auto& d : ds.days) {
    pts.push_back(d.matrix.flat());
    if (pts.back().size() != pts.front().size()) throw ArgumentError("kmeans: days differ in shape");
  }

  Rng rng(opts.seed);
  std::optional<LloydRun> best;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    auto run = lloyd(pts, seed_plus_plus(pts, k, rng), opts.max_iterations);
    if (!best || run.inertia < best->inertia) best = std::move(run);
  }

  auto model = make_model(ds, best->labels, Method::KMeans);
  model.params.seed = opts.seed;
  model.params.restarts = opts.restarts;
  model.params.inertia = best->inertia;
  model.params.iterations = best->iterations;
  model.params.inertia_trace = std::move(best->trace);
  return model;
}

double inertia(const Dataset& ds, const ClusterModel& model) {
  if (model.centroids.size() != model.k) throw ArgumentError("inertia: model has no centroids");
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    total += squared_distance(ds.days[i].matrix.flat(), model.centroids.at(model.assignments.at(i)).flat());
  return total;
}

std::size_t medoid(const DistanceMatrix& dm, std::span<const std::size_t> members) {
  if (members.empty()) throw ArgumentError("medoid: empty member list");
  std::size_t best = members.front();
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t a : members) {
    if (a >= dm.size()) throw ArgumentError("medoid: day index out of range");
    double s = 0.0;
    for (std::size_t b : members) s += dm(a, b);
    if (s < best_sum || (s == best_sum && a < best)) {
      best_sum = s;
      best = a;
    }
  }
  return best;
}

}  // namespace repdays
