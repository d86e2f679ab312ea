#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace repdays::cli {

/// Exit codes of the repdays tool.
enum ExitCode : int {
  kOk = 0,
  kInvalidConfig = 1,    // bad flag, config value or precondition
  kMissingArtifact = 2,  // an upstream stage's output file is absent
  kDataError = 3,        // input parses badly or yields no usable data
  kIoError = 4,
};

/// Every setting of every command; each field has a flag and a config-file key
/// of the same name.
struct RunConfig {
  // ingest
  std::string input;  // hourly CSV; defaults to <out>/data.csv
  std::string timestamp_column = "timestamp";
  std::vector<std::string> columns;  // empty = all non-timestamp columns
  bool normalize = true;

  // distances
  std::optional<std::size_t> window;
  std::vector<double> weights;
  unsigned threads = 0;

  // cluster / metrics / sweep
  // kmeans | ahc | ahc-complete | ahc-average; sweep takes a list. Empty means
  // ahc-average for cluster/run and all three methods for sweep.
  std::string method;
  std::string linkage = "average";  // used with --method ahc
  std::size_t k = 14;
  std::size_t k_min = 2;
  std::size_t k_max = 20;
  std::uint64_t seed = 42;
  std::size_t restarts = 10;

  // synth
  std::size_t days = 730;
  double outlier_probability = 0.02;
  bool wind = false;
  std::string start = "2019-01-01";

  // report
  std::string representative = "centroid";
  bool denormalize = false;

  std::filesystem::path out = "out";
};

/// File names inside the output directory.
namespace files {
inline constexpr const char* kSynthCsv = "data.csv";
inline constexpr const char* kLabels = "labels.json";
inline constexpr const char* kDataset = "dataset.json";
inline constexpr const char* kExclusions = "exclusions.json";
inline constexpr const char* kRowErrors = "row_errors.json";
inline constexpr const char* kDistances = "distances.csv";
inline constexpr const char* kModel = "model.json";
inline constexpr const char* kValidationJson = "validation.json";
inline constexpr const char* kValidationCsv = "validation.csv";
inline constexpr const char* kSweepJson = "sweep.json";
inline constexpr const char* kSweepCsv = "sweep.csv";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportCsv = "report.csv";
inline constexpr const char* kReportSvg = "report.svg";
}  // namespace files

// Each command throws on failure; run_cli maps exceptions to exit codes.
void cmd_synth(const RunConfig& cfg);
void cmd_ingest(const RunConfig& cfg);
void cmd_distances(const RunConfig& cfg);
void cmd_cluster(const RunConfig& cfg);
void cmd_metrics(const RunConfig& cfg);
void cmd_sweep(const RunConfig& cfg);
void cmd_report(const RunConfig& cfg);
/// ingest -> distances -> cluster -> metrics -> report in one process.
void cmd_run(const RunConfig& cfg);

/// Parses `repdays <command> [flags]` and runs it. Errors are written to `err`
/// as one JSON object per line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses "a..b".
std::pair<std::size_t, std::size_t> parse_k_range(const std::string& text);

}  // namespace repdays::cli
