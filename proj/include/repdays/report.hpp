#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "repdays/clustering.hpp"
#include "repdays/dataset.hpp"
#include "repdays/dtw.hpp"

namespace repdays {

using MonthCounts = std::array<std::size_t, 12>;  // index 0 = January

/// Per-cluster count of member days by calendar month, pooled across years.
std::vector<MonthCounts> monthly_histogram(const ClusterModel& model, const Dataset& ds);

/// Fraction of the months present in `ds` whose largest single cluster holds
/// more than 2/3 of that month's days.
double seasonal_coherence(const ClusterModel& model, const Dataset& ds);

enum class Representative { Centroid, Medoid };

struct ReportOptions {
  Representative representative = Representative::Centroid;
  /// Report profiles in the original units (needs a normalized dataset).
  bool denormalize = false;
};

/// Values are stored rounded to 6 significant digits, the precision every
/// emitter writes, so the JSON form reproduces the report exactly.
struct ClusterSummary {
  std::size_t id = 0;  // 1-based
  std::size_t member_count = 0;
  std::vector<Date> member_dates;
  MonthCounts histogram{};
  std::optional<Date> medoid;
  std::vector<std::vector<double>> representative;                // [variable][hour]
  std::vector<std::vector<std::vector<double>>> member_profiles;  // [member][variable][hour]

  bool operator==(const ClusterSummary&) const = default;
};

struct ScenarioReport {
  std::string method;
  std::size_t k = 0;
  std::size_t n_days = 0;
  std::vector<std::string> variables;
  Date first_day;
  Date last_day;
  std::string representative = "centroid";
  bool denormalized = false;
  double seasonal_coherence = 0.0;
  std::vector<ClusterSummary> clusters;

  bool operator==(const ScenarioReport&) const = default;
};

/// `dm` is only consulted for medoids and may be null otherwise.
ScenarioReport build_report(const ClusterModel& model, const Dataset& ds, const DistanceMatrix* dm,
                            const ReportOptions& opts = {});

void emit_json(const ScenarioReport& report, std::ostream& out);
ScenarioReport parse_report_json(std::istream& in);

/// One row per cluster-month and one per cluster-variable-hour.
void emit_csv(const ScenarioReport& report, std::ostream& out);

/// Self-contained SVG grid: per cluster one panel per variable (member traces
/// and the representative in black) plus a 12-bin month histogram.
void emit_svg(const ScenarioReport& report, std::ostream& out);

/// Rounds to 6 significant digits (the precision of every text emitter).
double round_sig6(double x);
std::string format_sig6(double x);

}  // namespace repdays
