#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "repdays/clustering.hpp"
#include "repdays/dtw.hpp"
#include "repdays/error.hpp"
#include "repdays/metrics.hpp"
#include "repdays/report.hpp"
#include "repdays/synth.hpp"

namespace py = pybind11;
using namespace repdays;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw ArgumentError("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

ProfileMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ArgumentError("expected an (hours, variables) array");
  ProfileMatrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.flat().begin());
  return m;
}

// days: (N, 24, m). Dates default to consecutive days from 2019-01-01.
Dataset to_dataset(const Array& days, const std::optional<std::vector<std::string>>& dates) {
  if (days.ndim() != 3) throw ArgumentError("expected a (days, hours, variables) array");
  const auto n = std::size_t(days.shape(0)), h = std::size_t(days.shape(1)), m = std::size_t(days.shape(2));
  if (dates && dates->size() != n) throw ArgumentError("dates must have one entry per day");
  Dataset ds;
  for (std::size_t v = 0; v < m; ++v) ds.variable_names.push_back("v" + std::to_string(v + 1));
  const Date start{2019, 1, 1};
  for (std::size_t i = 0; i < n; ++i) {
    DayProfile d;
    if (dates) {
      auto p = Date::parse((*dates)[i]);
      if (!p) throw ArgumentError("invalid date '" + (*dates)[i] + "'");
      d.date = *p;
    } else {
      d.date = start.plus_days(int(i));
    }
    d.matrix = ProfileMatrix(h, m);
    std::copy(days.data() + i * h * m, days.data() + (i + 1) * h * m, d.matrix.flat().begin());
    d.variable_names = ds.variable_names;
    ds.days.push_back(std::move(d));
  }
  return ds;
}

py::array_t<double> dataset_values(const Dataset& ds) {
  const std::size_t n = ds.size(), m = ds.num_vars();
  py::array_t<double> out({n, kHoursPerDay, m});
  auto* p = out.mutable_data();
  for (const auto& d : ds.days) p = std::copy(d.matrix.flat().begin(), d.matrix.flat().end(), p);
  return out;
}

DistanceMatrix to_distance_matrix(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw ArgumentError("expected a square distance matrix");
  const auto n = std::size_t(a.shape(0));
  DistanceMatrix dm(n);
  auto r = a.unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dm.set(i, j, r(i, j));
  return dm;
}

py::array_t<double> from_distance_matrix(const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  py::array_t<double> out({n, n});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = dm(i, j);
  return out;
}

DtwOptions dtw_opts(std::optional<std::size_t> window, std::vector<double> weights) {
  return DtwOptions{window, std::move(weights)};
}

py::dict model_dict(const ClusterModel& m) {
  py::dict d;
  d["k"] = m.k;
  d["method"] = to_string(m.method);
  d["labels"] = py::array_t<std::size_t>(m.assignments.size(), m.assignments.data());
  d["members"] = m.members;
  if (m.params.inertia) d["inertia"] = *m.params.inertia;
  if (!m.params.inertia_trace.empty()) d["inertia_trace"] = m.params.inertia_trace;
  return d;
}

ClusterModel labels_model(const Dataset& ds, const std::vector<std::size_t>& labels, const std::string& method) {
  if (labels.size() != ds.size()) throw ArgumentError("labels must have one entry per day");
  return make_model(ds, labels, method_from_string(method));
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Representative-day clustering of hourly energy profiles";

  py::register_exception<ArgumentError>(mod, "ArgumentError", PyExc_ValueError);
  py::register_exception<DataError>(mod, "DataError", PyExc_RuntimeError);
  py::register_exception<FormatError>(mod, "FormatError", PyExc_RuntimeError);

  mod.def(
      "dtw_distance",
      [](const Array& a, const Array& b, std::optional<std::size_t> window) {
        auto x = to_vector(a), y = to_vector(b);
        return dtw_distance(x, y, window);
      },
      py::arg("a"), py::arg("b"), py::arg("window") = py::none(),
      "Time-normalized DTW distance between two 1-d series.");

  mod.def(
      "dtw_path",
      [](const Array& a, const Array& b, std::optional<std::size_t> window) {
        auto x = to_vector(a), y = to_vector(b);
        auto al = dtw_align(x, y, window);
        std::vector<std::pair<std::size_t, std::size_t>> steps(al.path.steps.begin(), al.path.steps.end());
        return py::make_tuple(al.distance, steps);
      },
      py::arg("a"), py::arg("b"), py::arg("window") = py::none());

  mod.def(
      "brute_force_dtw",
      [](const Array& a, const Array& b) {
        auto x = to_vector(a), y = to_vector(b);
        return brute_force_dtw(x, y);
      },
      py::arg("a"), py::arg("b"));

  mod.def(
      "multivariate_dtw",
      [](const Array& a, const Array& b, std::optional<std::size_t> window, std::vector<double> weights) {
        return multivariate_dtw(to_matrix(a), to_matrix(b), dtw_opts(window, std::move(weights)));
      },
      py::arg("a"), py::arg("b"), py::arg("window") = py::none(), py::arg("weights") = std::vector<double>{});

  mod.def(
      "generate",
      [](std::uint64_t seed, std::size_t n_days, double outlier_probability, bool wind) {
        const auto res = generate(SynthConfig::standard(seed, n_days, outlier_probability, wind));
        std::vector<std::string> dates;
        std::vector<bool> outlier;
        for (const auto& l : res.labels) {
          dates.push_back(l.date.iso());
          outlier.push_back(l.outlier);
        }
        py::dict d;
        d["values"] = dataset_values(res.dataset);
        d["dates"] = dates;
        d["variables"] = res.dataset.variable_names;
        d["outlier"] = outlier;
        return d;
      },
      py::arg("seed") = 42, py::arg("n_days") = 730, py::arg("outlier_probability") = 0.02,
      py::arg("wind") = false, "Seeded synthetic dataset; values are raw (not normalized).");

  mod.def(
      "distance_matrix",
      [](const Array& days, std::optional<std::size_t> window, std::vector<double> weights, unsigned threads) {
        const auto ds = to_dataset(days, std::nullopt);
        DistanceMatrix dm;
        {
          py::gil_scoped_release release;
          dm = distance_matrix(ds, dtw_opts(window, std::move(weights)), threads);
        }
        return from_distance_matrix(dm);
      },
      py::arg("days"), py::arg("window") = py::none(), py::arg("weights") = std::vector<double>{},
      py::arg("threads") = 0u);

  mod.def(
      "ahc",
      [](const Array& dm, const std::string& linkage) {
        const auto h = ahc(to_distance_matrix(dm), linkage_from_string(linkage));
        py::array_t<double> out({h.merges.size(), std::size_t(4)});
        auto w = out.mutable_unchecked<2>();
        for (std::size_t s = 0; s < h.merges.size(); ++s) {
          w(s, 0) = double(h.merges[s].left);
          w(s, 1) = double(h.merges[s].right);
          w(s, 2) = h.merges[s].distance;
          w(s, 3) = double(h.merges[s].size);
        }
        return out;
      },
      py::arg("dm"), py::arg("linkage") = "average",
      "Merge history as rows (left id, right id, height, size).");

  mod.def(
      "fit_ahc",
      [](const Array& days, const Array& dm, const std::string& linkage, std::size_t k) {
        const auto ds = to_dataset(days, std::nullopt);
        return model_dict(fit_ahc(ds, to_distance_matrix(dm), linkage_from_string(linkage), k));
      },
      py::arg("days"), py::arg("dm"), py::arg("linkage"), py::arg("k"));

  mod.def(
      "kmeans",
      [](const Array& days, std::size_t k, std::uint64_t seed, std::size_t restarts, std::size_t max_iterations) {
        const auto ds = to_dataset(days, std::nullopt);
        return model_dict(kmeans(ds, k, KMeansOptions{seed, restarts, max_iterations}));
      },
      py::arg("days"), py::arg("k"), py::arg("seed") = 42, py::arg("restarts") = 10,
      py::arg("max_iterations") = 300);

  mod.def(
      "validate",
      [](const Array& days, const std::vector<std::size_t>& labels, const std::string& method,
         std::optional<std::size_t> window, std::vector<double> weights) {
        const auto ds = to_dataset(days, std::nullopt);
        const auto r = validate(ds, labels_model(ds, labels, method), dtw_opts(window, std::move(weights)));
        py::dict d;
        d["method"] = to_string(r.method);
        d["k"] = r.k;
        d["ma"] = r.ma;
        d["mc"] = r.mc;
        d["ss"] = r.ss;
        d["cs"] = r.cs;
        d["ch"] = r.ch;
        d["db"] = r.db;
        d["silhouette"] = r.silhouette;
        return d;
      },
      py::arg("days"), py::arg("labels"), py::arg("method") = "ahc-average", py::arg("window") = py::none(),
      py::arg("weights") = std::vector<double>{});

  mod.def(
      "sweep",
      [](const Array& days, const Array& dm, std::size_t k_min, std::size_t k_max,
         std::vector<std::string> methods, std::uint64_t seed, std::size_t restarts) {
        const auto ds = to_dataset(days, std::nullopt);
        SweepOptions opts;
        if (!methods.empty()) {
          opts.methods.clear();
          for (const auto& m : methods) opts.methods.push_back(method_from_string(m));
        }
        opts.k_min = k_min;
        opts.k_max = k_max;
        opts.kmeans.seed = seed;
        opts.kmeans.restarts = restarts;
        const auto matrix = to_distance_matrix(dm);
        MetricSweep s;
        {
          py::gil_scoped_release release;
          s = sweep(ds, matrix, opts);
        }
        py::list rows;
        for (const auto& r : s.rows) {
          py::dict d;
          d["method"] = to_string(r.method);
          d["k"] = r.k;
          d["ok"] = r.ok;
          d["error"] = r.error;
          d["ss"] = r.ss;
          d["cs"] = r.cs;
          d["ch"] = r.ch;
          d["db"] = r.db;
          d["silhouette"] = r.silhouette;
          d["min_cluster_size"] = r.min_cluster_size;
          rows.append(d);
        }
        return rows;
      },
      py::arg("days"), py::arg("dm"), py::arg("k_min") = 2, py::arg("k_max") = 20,
      py::arg("methods") = std::vector<std::string>{}, py::arg("seed") = 42, py::arg("restarts") = 10);

  mod.def(
      "seasonal_coherence",
      [](const std::vector<std::string>& dates, const std::vector<std::size_t>& labels) {
        py::array_t<double> days({dates.size(), kHoursPerDay, std::size_t(1)});
        std::fill(days.mutable_data(), days.mutable_data() + days.size(), 0.0);
        const auto ds = to_dataset(days, dates);
        return seasonal_coherence(labels_model(ds, labels, "ahc-average"), ds);
      },
      py::arg("dates"), py::arg("labels"),
      "Share of clusters whose most frequent month holds more than two thirds of its days.");
}
