#include "repdays/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "repdays/error.hpp"

namespace repdays {

using nlohmann::json;

std::string format_exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

namespace {

Date parse_date_or_throw(const std::string& s) {
  auto d = Date::parse(s);
  if (!d) throw FormatError("invalid date '" + s + "'");
  return *d;
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw FormatError("invalid number '" + s + "'");
  return v;
}

std::size_t parse_size(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw FormatError("invalid count '" + s + "'");
  return std::stoull(s);
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_exact(*v) : std::string(); }

std::optional<double> optional_from(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void write_dataset_json(const Dataset& ds, std::ostream& out) {
  json j;
  j["variables"] = ds.variable_names;
  if (ds.normalization) {
    j["normalization"] = json::array();
    for (const auto& r : *ds.normalization) j["normalization"].push_back({{"min", r.min}, {"max", r.max}});
  } else {
    j["normalization"] = nullptr;
  }
  j["days"] = json::array();
  for (const auto& d : ds.days) {
    json rows = json::array();
    for (std::size_t h = 0; h < d.matrix.hours(); ++h) {
      json row = json::array();
      for (std::size_t v = 0; v < d.matrix.vars(); ++v) row.push_back(d.matrix(h, v));
      rows.push_back(std::move(row));
    }
    j["days"].push_back({{"date", d.date.iso()}, {"values", std::move(rows)}});
  }
  out << j.dump() << '\n';
}

Dataset read_dataset_json(std::istream& in) {
  return guarded("dataset JSON", [&] {
    const json j = json::parse(in);
    Dataset ds;
    ds.variable_names = j.at("variables").get<std::vector<std::string>>();
    const std::size_t m = ds.variable_names.size();
    if (!j.at("normalization").is_null()) {
      std::vector<VariableRange> ranges;
      for (const auto& r : j.at("normalization")) ranges.push_back({r.at("min").get<double>(), r.at("max").get<double>()});
      if (ranges.size() != m) throw FormatError("dataset JSON: normalization does not match variables");
      ds.normalization = std::move(ranges);
    }
    for (const auto& jd : j.at("days")) {
      const auto rows = jd.at("values").get<std::vector<std::vector<double>>>();
      DayProfile d{parse_date_or_throw(jd.at("date").get<std::string>()), ProfileMatrix(rows.size(), m),
                   ds.variable_names};
      for (std::size_t h = 0; h < rows.size(); ++h) {
        if (rows[h].size() != m) throw FormatError("dataset JSON: row width does not match variables");
        for (std::size_t v = 0; v < m; ++v) d.matrix(h, v) = rows[h][v];
      }
      if (!ds.days.empty() && !(ds.days.back().date < d.date))
        throw FormatError("dataset JSON: dates not strictly ascending at " + d.date.iso());
      ds.days.push_back(std::move(d));
    }
    return ds;
  });
}

void write_exclusions_json(const std::vector<Exclusion>& exclusions, std::ostream& out) {
  json j = json::array();
  for (const auto& e : exclusions) j.push_back({{"date", e.date.iso()}, {"reason", e.reason}});
  out << j.dump(1) << '\n';
}

std::vector<Exclusion> read_exclusions_json(std::istream& in) {
  return guarded("exclusion JSON", [&] {
    std::vector<Exclusion> out;
    for (const auto& e : json::parse(in))
      out.push_back({parse_date_or_throw(e.at("date").get<std::string>()), e.at("reason").get<std::string>()});
    return out;
  });
}

void write_hourly_csv(const Dataset& ds, std::ostream& out) {
  out << "timestamp";
  for (const auto& v : ds.variable_names) out << ',' << v;
  out << '\n';
  for (const auto& d : ds.days)
    for (std::size_t h = 0; h < d.matrix.hours(); ++h) {
      out << Timestamp{d.date, unsigned(h)}.iso();
      for (std::size_t v = 0; v < d.matrix.vars(); ++v) out << ',' << format_exact(d.matrix(h, v));
      out << '\n';
    }
}

void write_labels_json(const SynthConfig& cfg, const std::vector<DayLabel>& labels, std::ostream& out) {
  json j;
  j["seed"] = cfg.seed;
  j["n_days"] = cfg.n_days;
  j["generator"] = "mt19937_64";
  j["variables"] = json::array();
  for (const auto& v : cfg.variables)
    j["variables"].push_back({{"name", v.name},
                              {"kind", to_string(v.kind)},
                              {"event_probability", v.event_probability}});
  std::size_t outliers = 0;
  j["days"] = json::array();
  for (const auto& l : labels) {
    outliers += l.outlier ? 1 : 0;
    j["days"].push_back({{"date", l.date.iso()}, {"outlier", l.outlier}, {"events", l.events}});
  }
  j["outlier_count"] = outliers;
  out << j.dump(1) << '\n';
}

std::vector<DayLabel> read_labels_json(std::istream& in) {
  return guarded("labels JSON", [&] {
    std::vector<DayLabel> out;
    const json j = json::parse(in);
    for (const auto& d : j.at("days"))
      out.push_back({parse_date_or_throw(d.at("date").get<std::string>()), d.at("outlier").get<bool>(),
                     d.at("events").get<std::vector<std::string>>()});
    return out;
  });
}

void write_distance_matrix(const DistanceMatrixFile& f, std::ostream& out) {
  const std::size_t n = f.matrix.size();
  out << "repdays-distance-matrix,1\n";
  out << "n," << n << '\n';
  out << "variables";
  for (const auto& v : f.variables) out << ',' << v;
  out << "\nweights";
  for (double w : f.weights) out << ',' << format_exact(w);
  out << "\nwindow," << (f.window ? std::to_string(*f.window) : std::string("none")) << '\n';
  out << "dates";
  for (const auto& d : f.dates) out << ',' << d.iso();
  out << '\n';
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (j) out << ',';
      out << format_exact(f.matrix(i, j));
    }
    out << '\n';
  }
}

DistanceMatrixFile read_distance_matrix(std::istream& in) {
  std::string line;
  auto next_fields = [&](const char* key) {
    if (!std::getline(in, line)) throw FormatError(std::string("distance matrix: missing '") + key + "' line");
    auto fields = split_commas(line);
    if (fields.empty() || fields[0] != key)
      throw FormatError(std::string("distance matrix: expected '") + key + "' line");
    fields.erase(fields.begin());
    return fields;
  };
  auto magic = next_fields("repdays-distance-matrix");
  if (magic.size() != 1 || magic[0] != "1") throw FormatError("distance matrix: unsupported version");

  DistanceMatrixFile f;
  auto n_fields = next_fields("n");
  if (n_fields.size() != 1) throw FormatError("distance matrix: bad 'n' line");
  const std::size_t n = parse_size(n_fields[0]);
  f.variables = next_fields("variables");
  for (const auto& w : next_fields("weights")) f.weights.push_back(parse_double(w));
  auto window = next_fields("window");
  if (window.size() != 1) throw FormatError("distance matrix: bad 'window' line");
  if (window[0] != "none") f.window = parse_size(window[0]);
  for (const auto& d : next_fields("dates")) f.dates.push_back(parse_date_or_throw(d));
  if (f.dates.size() != n) throw FormatError("distance matrix: date count does not match n");

  f.matrix = DistanceMatrix(n);
  for (std::size_t i = 1; i < n; ++i) {
    if (!std::getline(in, line)) throw FormatError("distance matrix: truncated at row " + std::to_string(i));
    const auto cells = split_commas(line);
    if (cells.size() != i) throw FormatError("distance matrix: row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < i; ++j) {
      const double d = parse_double(cells[j]);
      if (!(d >= 0.0)) throw FormatError("distance matrix: negative or NaN entry");
      f.matrix.set(i, j, d);
    }
  }
  return f;
}

void write_model_json(const ClusterModel& model, const Dataset& ds, std::ostream& out) {
  if (model.assignments.size() != ds.size()) throw ArgumentError("write_model_json: model does not match dataset");
  json j;
  j["method"] = to_string(model.method);
  json params = json::object();
  if (model.params.seed) params["seed"] = *model.params.seed;
  if (model.params.restarts) params["restarts"] = *model.params.restarts;
  if (model.params.inertia) params["inertia"] = *model.params.inertia;
  if (model.params.iterations) params["iterations"] = *model.params.iterations;
  if (!model.params.inertia_trace.empty()) params["inertia_trace"] = model.params.inertia_trace;
  j["params"] = params;
  j["K"] = model.k;
  j["variables"] = ds.variable_names;
  json assignments = json::object();
  for (std::size_t i = 0; i < ds.size(); ++i) assignments[ds.days[i].date.iso()] = model.assignments[i] + 1;
  j["assignments"] = assignments;
  j["memberships"] = json::array();
  for (const auto& members : model.members) {
    json dates = json::array();
    for (std::size_t i : members) dates.push_back(ds.days[i].date.iso());
    j["memberships"].push_back(std::move(dates));
  }
  j["centroids"] = json::array();
  for (const auto& c : model.centroids) {
    json rows = json::array();
    for (std::size_t h = 0; h < c.hours(); ++h) {
      json row = json::array();
      for (std::size_t v = 0; v < c.vars(); ++v) row.push_back(c(h, v));
      rows.push_back(std::move(row));
    }
    j["centroids"].push_back(std::move(rows));
  }
  out << j.dump(1) << '\n';
}

ClusterModel read_model_json(std::istream& in, const Dataset& ds) {
  return guarded("model JSON", [&] {
    const json j = json::parse(in);
    ClusterModel model;
    model.method = method_from_string(j.at("method").get<std::string>());
    model.k = j.at("K").get<std::size_t>();
    const auto& p = j.at("params");
    if (p.contains("seed")) model.params.seed = p.at("seed").get<std::uint64_t>();
    if (p.contains("restarts")) model.params.restarts = p.at("restarts").get<std::size_t>();
    if (p.contains("inertia")) model.params.inertia = p.at("inertia").get<double>();
    if (p.contains("iterations")) model.params.iterations = p.at("iterations").get<std::size_t>();
    if (p.contains("inertia_trace")) model.params.inertia_trace = p.at("inertia_trace").get<std::vector<double>>();

    const auto& a = j.at("assignments");
    if (a.size() != ds.size()) throw FormatError("model JSON: covers " + std::to_string(a.size()) +
                                                 " days, dataset has " + std::to_string(ds.size()));
    model.assignments.resize(ds.size());
    model.members.assign(model.k, {});
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto key = ds.days[i].date.iso();
      if (!a.contains(key)) throw FormatError("model JSON: no assignment for " + key);
      const auto id = a.at(key).get<std::size_t>();
      if (id < 1 || id > model.k) throw FormatError("model JSON: cluster id out of range for " + key);
      model.assignments[i] = id - 1;
      model.members[id - 1].push_back(i);
    }
    for (const auto& jc : j.at("centroids")) {
      const auto rows = jc.get<std::vector<std::vector<double>>>();
      ProfileMatrix c(rows.size(), rows.empty() ? 0 : rows.front().size());
      for (std::size_t h = 0; h < rows.size(); ++h)
        for (std::size_t v = 0; v < c.vars(); ++v) c(h, v) = rows[h].at(v);
      model.centroids.push_back(std::move(c));
    }
    if (!model.centroids.empty() && model.centroids.size() != model.k)
      throw FormatError("model JSON: centroid count does not match K");
    for (const auto& m : model.members)
      if (m.empty()) throw FormatError("model JSON: empty cluster");
    return model;
  });
}

void write_validation_json(const ValidationReport& r, const Dataset& ds, const ClusterModel& model,
                           std::ostream& out) {
  json j;
  j["method"] = to_string(r.method);
  j["K"] = r.k;
  j["SS"] = r.ss;
  j["CS"] = r.cs;
  j["CH"] = optional_json(r.ch);
  j["DB"] = optional_json(r.db);
  j["silhouette"] = optional_json(r.silhouette);
  j["days"] = json::array();
  for (std::size_t i = 0; i < r.ma.size(); ++i)
    j["days"].push_back({{"date", ds.days.at(i).date.iso()},
                         {"cluster", model.assignments.at(i) + 1},
                         {"MA", r.ma[i]},
                         {"MC", r.mc[i]}});
  out << j.dump(1) << '\n';
}

void write_validation_csv(const ValidationReport& r, std::ostream& out) {
  out << "method,k,ss,cs,ch,db,silhouette\n";
  out << to_string(r.method) << ',' << r.k << ',' << format_exact(r.ss) << ',' << format_exact(r.cs) << ','
      << optional_cell(r.ch) << ',' << optional_cell(r.db) << ',' << optional_cell(r.silhouette) << '\n';
}

void write_sweep_json(const MetricSweep& s, std::ostream& out) {
  json j;
  j["hierarchy_builds"] = s.hierarchy_builds;
  j["kmeans_fits"] = s.kmeans_fits;
  j["rows"] = json::array();
  for (const auto& r : s.rows) {
    json jr{{"method", to_string(r.method)}, {"K", r.k}, {"ok", r.ok}};
    if (r.ok) {
      jr["SS"] = r.ss;
      jr["CS"] = r.cs;
      jr["CH"] = optional_json(r.ch);
      jr["DB"] = optional_json(r.db);
      jr["silhouette"] = optional_json(r.silhouette);
      jr["min_cluster_size"] = r.min_cluster_size;
    } else {
      jr["error"] = r.error;
    }
    j["rows"].push_back(std::move(jr));
  }
  out << j.dump(1) << '\n';
}

void write_sweep_csv(const MetricSweep& s, std::ostream& out) {
  out << "method,k,ok,ss,cs,ch,db,silhouette,min_cluster_size,error\n";
  for (const auto& r : s.rows) {
    out << to_string(r.method) << ',' << r.k << ',' << (r.ok ? 1 : 0) << ',';
    if (r.ok) {
      out << format_exact(r.ss) << ',' << format_exact(r.cs) << ',' << optional_cell(r.ch) << ','
          << optional_cell(r.db) << ',' << optional_cell(r.silhouette) << ',' << r.min_cluster_size << ",\n";
    } else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
      out << ",,,,,," << msg << '\n';
    }
  }
}

MetricSweep read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "method,k,ok,ss,cs,ch,db,silhouette,min_cluster_size,error")
    throw FormatError("sweep CSV: unexpected header");
  MetricSweep s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_commas(line);
    if (c.size() != 10) throw FormatError("sweep CSV: expected 10 fields in '" + line + "'");
    SweepRow r;
    try {
      r.method = method_from_string(c[0]);
    } catch (const ArgumentError& e) {
      throw FormatError(std::string("sweep CSV: ") + e.what());
    }
    r.k = parse_size(c[1]);
    r.ok = c[2] == "1";
    if (r.ok) {
      r.ss = parse_double(c[3]);
      r.cs = parse_double(c[4]);
      r.ch = optional_from(c[5]);
      r.db = optional_from(c[6]);
      r.silhouette = optional_from(c[7]);
      r.min_cluster_size = parse_size(c[8]);
    } else {
      r.error = c[9];
    }
    s.rows.push_back(std::move(r));
  }
  return s;
}

}  // namespace repdays
