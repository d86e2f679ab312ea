#include "repdays/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "repdays/clustering.hpp"
#include "repdays/dtw.hpp"
#include "repdays/error.hpp"
#include "repdays/ingest.hpp"
#include "repdays/metrics.hpp"
#include "repdays/report.hpp"
#include "repdays/serialize.hpp"
#include "repdays/synth.hpp"

namespace repdays::cli {

namespace fs = std::filesystem;

namespace {

class MissingArtifact : public std::runtime_error {
 public:
  explicit MissingArtifact(const fs::path& p)
      : std::runtime_error("missing upstream artifact: " + p.string()), path(p.string()) {}
  std::string path;
};

fs::path artifact(const RunConfig& cfg, const char* name) { return cfg.out / name; }

void require(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw MissingArtifact(p);
}

std::ifstream open_in(const fs::path& p) {
  require(p);
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError(p.string(), "cannot open for reading");
  return in;
}

template <class F>
void write_file(const fs::path& p, F&& emit) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(p.string(), "cannot open for writing");
  emit(out);
  out.flush();
  if (!out) throw IoError(p.string(), "write failed");
}

DtwOptions dtw_options(const RunConfig& cfg) { return DtwOptions{cfg.window, cfg.weights}; }

Method cluster_method(const RunConfig& cfg) {
  const std::string m = cfg.method.empty() ? "ahc-average" : cfg.method;
  if (m == "ahc") return method_for(linkage_from_string(cfg.linkage));
  return method_from_string(m);
}

std::vector<Method> sweep_methods(const RunConfig& cfg) {
  if (cfg.method.empty()) return {Method::KMeans, Method::AhcComplete, Method::AhcAverage};
  std::vector<Method> out;
  std::stringstream ss(cfg.method);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "ahc")
      out.push_back(method_for(linkage_from_string(cfg.linkage)));
    else
      out.push_back(method_from_string(item));
  }
  return out;
}

Dataset load_dataset(const RunConfig& cfg) {
  auto in = open_in(artifact(cfg, files::kDataset));
  return read_dataset_json(in);
}

DistanceMatrixFile load_distances(const RunConfig& cfg, const Dataset& ds) {
  auto in = open_in(artifact(cfg, files::kDistances));
  auto f = read_distance_matrix(in);
  if (f.matrix.size() != ds.size()) throw DataError("distance matrix has " + std::to_string(f.matrix.size()) +
                                                    " days, dataset has " + std::to_string(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (f.dates[i] != ds.days[i].date) throw DataError("distance matrix dates do not match the dataset");
  return f;
}

ClusterModel load_model(const RunConfig& cfg, const Dataset& ds) {
  auto in = open_in(artifact(cfg, files::kModel));
  return read_model_json(in, ds);
}

// Stages shared by the individual commands and by `run`.

Dataset stage_ingest(const RunConfig& cfg) {
  const fs::path input = cfg.input.empty() ? artifact(cfg, files::kSynthCsv) : fs::path(cfg.input);
  auto in = open_in(input);
  CsvSchema schema{cfg.timestamp_column, cfg.columns};
  auto parsed = parse_csv(in, schema);
  auto built = build_days(parsed.records, parsed.variable_names);
  Dataset ds = cfg.normalize ? normalize(built.dataset) : std::move(built.dataset);

  write_file(artifact(cfg, files::kDataset), [&](std::ostream& o) { write_dataset_json(ds, o); });
  write_file(artifact(cfg, files::kExclusions), [&](std::ostream& o) { write_exclusions_json(built.exclusions, o); });
  write_file(artifact(cfg, files::kRowErrors), [&](std::ostream& o) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : parsed.row_errors) j.push_back({{"line", e.line}, {"message", e.message}});
    o << j.dump(1) << '\n';
  });
  return ds;
}

DistanceMatrixFile stage_distances(const RunConfig& cfg, const Dataset& ds) {
  const auto opts = dtw_options(cfg);
  DistanceMatrixFile f;
  f.matrix = distance_matrix(ds, opts, cfg.threads);
  f.variables = ds.variable_names;
  f.weights = resolve_weights(opts, ds.num_vars());
  f.window = cfg.window;
  for (const auto& d : ds.days) f.dates.push_back(d.date);
  write_file(artifact(cfg, files::kDistances), [&](std::ostream& o) { write_distance_matrix(f, o); });
  return f;
}

ClusterModel stage_cluster(const RunConfig& cfg, const Dataset& ds, const DistanceMatrix* dm) {
  const Method method = cluster_method(cfg);
  ClusterModel model;
  if (auto linkage = linkage_of(method)) {
    if (!dm) throw MissingArtifact(artifact(cfg, files::kDistances));
    model = fit_ahc(ds, *dm, *linkage, cfg.k);
  } else {
    model = kmeans(ds, cfg.k, KMeansOptions{cfg.seed, cfg.restarts, 300});
  }
  write_file(artifact(cfg, files::kModel), [&](std::ostream& o) { write_model_json(model, ds, o); });
  return model;
}

ValidationReport stage_metrics(const RunConfig& cfg, const Dataset& ds, const ClusterModel& model) {
  const auto report = validate(ds, model, dtw_options(cfg));
  write_file(artifact(cfg, files::kValidationJson), [&](std::ostream& o) { write_validation_json(report, ds, model, o); });
  write_file(artifact(cfg, files::kValidationCsv), [&](std::ostream& o) { write_validation_csv(report, o); });
  return report;
}

void stage_report(const RunConfig& cfg, const Dataset& ds, const ClusterModel& model, const DistanceMatrix* dm) {
  ReportOptions opts;
  if (cfg.representative == "centroid")
    opts.representative = Representative::Centroid;
  else if (cfg.representative == "medoid")
    opts.representative = Representative::Medoid;
  else
    throw ArgumentError("unknown representative '" + cfg.representative + "' (expected centroid or medoid)");
  opts.denormalize = cfg.denormalize;
  const auto report = build_report(model, ds, dm, opts);
  write_file(artifact(cfg, files::kReportJson), [&](std::ostream& o) { emit_json(report, o); });
  write_file(artifact(cfg, files::kReportCsv), [&](std::ostream& o) { emit_csv(report, o); });
  write_file(artifact(cfg, files::kReportSvg), [&](std::ostream& o) { emit_svg(report, o); });
}

}  // namespace

void cmd_synth(const RunConfig& cfg) {
  auto start = Date::parse(cfg.start);
  if (!start) throw ArgumentError("invalid start date '" + cfg.start + "'");
  if (!(cfg.outlier_probability >= 0.0 && cfg.outlier_probability < 1.0))
    throw ArgumentError("outlier_probability must lie in [0, 1)");
  auto synth_cfg = SynthConfig::standard(cfg.seed, cfg.days, cfg.outlier_probability, cfg.wind);
  synth_cfg.start = *start;
  const auto result = generate(synth_cfg);
  write_file(artifact(cfg, files::kSynthCsv), [&](std::ostream& o) { write_hourly_csv(result.dataset, o); });
  write_file(artifact(cfg, files::kLabels), [&](std::ostream& o) { write_labels_json(synth_cfg, result.labels, o); });
}

void cmd_ingest(const RunConfig& cfg) { stage_ingest(cfg); }

void cmd_distances(const RunConfig& cfg) { stage_distances(cfg, load_dataset(cfg)); }

void cmd_cluster(const RunConfig& cfg) {
  const auto ds = load_dataset(cfg);
  std::optional<DistanceMatrixFile> dm;
  if (linkage_of(cluster_method(cfg))) dm = load_distances(cfg, ds);
  stage_cluster(cfg, ds, dm ? &dm->matrix : nullptr);
}

void cmd_metrics(const RunConfig& cfg) {
  const auto ds = load_dataset(cfg);
  stage_metrics(cfg, ds, load_model(cfg, ds));
}

void cmd_sweep(const RunConfig& cfg) {
  const auto ds = load_dataset(cfg);
  const auto dm = load_distances(cfg, ds);
  if (cfg.k_min < 2 || cfg.k_max + 1 > ds.size() || cfg.k_min > cfg.k_max)
    throw ArgumentError("K range " + std::to_string(cfg.k_min) + ".." + std::to_string(cfg.k_max) +
                        " must lie within [2, " + std::to_string(ds.size() - 1) + "]");
  SweepOptions opts;
  opts.methods = sweep_methods(cfg);
  opts.k_min = cfg.k_min;
  opts.k_max = cfg.k_max;
  opts.kmeans = KMeansOptions{cfg.seed, cfg.restarts, 300};
  opts.dtw = dtw_options(cfg);
  opts.threads = cfg.threads;
  const auto result = sweep(ds, dm.matrix, opts);
  write_file(artifact(cfg, files::kSweepJson), [&](std::ostream& o) { write_sweep_json(result, o); });
  write_file(artifact(cfg, files::kSweepCsv), [&](std::ostream& o) { write_sweep_csv(result, o); });
}

void cmd_report(const RunConfig& cfg) {
  const auto ds = load_dataset(cfg);
  const auto model = load_model(cfg, ds);
  std::optional<DistanceMatrixFile> dm;
  if (fs::exists(artifact(cfg, files::kDistances)) || cfg.representative == "medoid") dm = load_distances(cfg, ds);
  stage_report(cfg, ds, model, dm ? &dm->matrix : nullptr);
}

void cmd_run(const RunConfig& cfg) {
  const auto ds = stage_ingest(cfg);
  const auto dm = stage_distances(cfg, ds);
  const auto model = stage_cluster(cfg, ds, &dm.matrix);
  stage_metrics(cfg, ds, model);
  stage_report(cfg, ds, model, &dm.matrix);
}

std::pair<std::size_t, std::size_t> parse_k_range(const std::string& text) {
  const auto pos = text.find("..");
  auto bad = [&] { return ArgumentError("invalid K range '" + text + "' (expected a..b)"); };
  if (pos == std::string::npos) throw bad();
  const std::string a = text.substr(0, pos), b = text.substr(pos + 2);
  if (a.empty() || b.empty() || a.find_first_not_of("0123456789") != std::string::npos ||
      b.find_first_not_of("0123456789") != std::string::npos)
    throw bad();
  const std::size_t lo = std::stoull(a), hi = std::stoull(b);
  if (lo > hi) throw bad();
  return {lo, hi};
}

namespace {

struct CliState {
  RunConfig cfg;
  std::string config;
  long long window = -1;
  std::string k_range;
};

void add_common_options(CLI::App& sub, CliState& st) {
  auto& c = st.cfg;
  sub.add_option("--config", st.config, "INI/TOML key = value file; keys are the long flag names");
  sub.add_option("--out", c.out, "Output directory for all stage artifacts")->capture_default_str();
  sub.add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
  sub.add_option("--input", c.input, "Hourly CSV to ingest (default <out>/data.csv)");
  sub.add_option("--timestamp-column", c.timestamp_column, "Name of the timestamp column")->capture_default_str();
  sub.add_option("--columns", c.columns, "Value columns to read (default: all others)")->delimiter(',');
  sub.add_flag("--normalize,!--no-normalize", c.normalize, "Global min-max normalization per variable");
  sub.add_option("--window", st.window, "Sakoe-Chiba half-width for DTW (default: none)");
  sub.add_option("--weights", c.weights, "Per-variable DTW weights, comma separated")->delimiter(',');
  sub.add_option("--threads", c.threads, "Worker threads, 0 = all cores")->capture_default_str();
  sub.add_option("--method", c.method,
                 "kmeans, ahc, ahc-complete or ahc-average (sweep: comma separated list, default all)");
  sub.add_option("--linkage", c.linkage, "Linkage for --method ahc: complete or average")->capture_default_str();
  sub.add_option("--k", c.k, "Number of clusters")->capture_default_str();
  sub.add_option("--k-range", st.k_range, "Cluster counts for sweep, a..b (default 2..20)");
  sub.add_option("--restarts", c.restarts, "k-means restarts")->capture_default_str();
  sub.add_option("--days", c.days, "Synthetic days to generate")->capture_default_str();
  sub.add_option("--outlier-probability", c.outlier_probability, "Per-day outlier probability for synth")
      ->capture_default_str();
  sub.add_flag("--wind", c.wind, "Add a wind variable to synthetic data");
  sub.add_option("--start", c.start, "First synthetic date (YYYY-MM-DD)")->capture_default_str();
  sub.add_option("--representative", c.representative, "centroid or medoid")->capture_default_str();
  sub.add_flag("--denormalize", c.denormalize, "Report profiles in original units");
}

// Config values fill in options not given on the command line. Keys may sit at
// top level or in a section named after the command.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read config file '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ArgumentError("config file '" + path + "': " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section open/close markers
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub.get_name())) continue;
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw ArgumentError("config file '" + path + "' may not name another config file");
    auto* opt = sub.get_option_no_throw("--" + key);
    if (!opt) throw ArgumentError("unknown key '" + item.name + "' in config file '" + path + "'");
    if (opt->count() > 0) continue;
    try {
      for (const auto& v : item.inputs) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ArgumentError("config key '" + item.name + "': " + e.what());
    }
  }
}

void write_error(std::ostream& err, int code, const std::string& kind, const std::string& message,
                 const std::string& path = {}) {
  nlohmann::json j{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
  if (!path.empty()) j["error"]["path"] = path;
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Representative-day scenarios from hourly load/solar/wind data"};
  app.name("repdays");
  app.require_subcommand(1);
  CliState st;

  struct Command {
    const char* name;
    const char* help;
    void (*fn)(const RunConfig&);
  };
  const Command commands[] = {
      {"synth", "Generate a seeded synthetic hourly dataset and its outlier labels", cmd_synth},
      {"ingest", "Parse hourly CSV into normalized day profiles", cmd_ingest},
      {"distances", "Compute the pairwise multivariate DTW distance matrix", cmd_distances},
      {"cluster", "Fit one clustering (AHC on the distance matrix, or k-means)", cmd_cluster},
      {"metrics", "Score the fitted clustering (SS, CS, CH, DB, silhouette)", cmd_metrics},
      {"sweep", "Score every method over a range of cluster counts", cmd_sweep},
      {"report", "Write the representative-day report (JSON, CSV, SVG)", cmd_report},
      {"run", "ingest, distances, cluster, metrics and report in one process", cmd_run},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common_options(*sub, st);
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    write_error(err, kInvalidConfig, "invalid_config", e.what());
    return kInvalidConfig;
  }

  try {
    for (auto& [sub, c] : subs)
      if (sub->parsed() && !st.config.empty()) apply_config(*sub, st.config);
    if (st.window >= 0) st.cfg.window = std::size_t(st.window);
    if (!st.k_range.empty()) std::tie(st.cfg.k_min, st.cfg.k_max) = parse_k_range(st.k_range);
    for (auto& [sub, c] : subs)
      if (sub->parsed()) {
        c->fn(st.cfg);
        out << nlohmann::json{{"command", c->name}, {"status", "ok"}, {"out", st.cfg.out.string()}}.dump() << '\n';
      }
    return kOk;
  } catch (const MissingArtifact& e) {
    write_error(err, kMissingArtifact, "missing_artifact", e.what(), e.path);
    return kMissingArtifact;
  } catch (const IoError& e) {
    write_error(err, kIoError, "io_error", e.what(), e.path());
    return kIoError;
  } catch (const ArgumentError& e) {
    write_error(err, kInvalidConfig, "invalid_config", e.what());
    return kInvalidConfig;
  } catch (const FormatError& e) {
    write_error(err, kDataError, "format_error", e.what());
    return kDataError;
  } catch (const DataError& e) {
    write_error(err, kDataError, "data_error", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    write_error(err, kDataError, "error", e.what());
    return kDataError;
  }
}

}  // namespace repdays::cli
