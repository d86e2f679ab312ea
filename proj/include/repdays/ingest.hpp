#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "repdays/dataset.hpp"
#include "repdays/date.hpp"

namespace repdays {

struct RawRecord {
  Timestamp timestamp;
  std::vector<double> values;  // one per schema value column
};

struct CsvSchema {
  std::string timestamp_column = "timestamp";
  /// Empty means every non-timestamp column, in header order.
  std::vector<std::string> value_columns;
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct ParseResult {
  std::vector<RawRecord> records;
  std::vector<std::string> variable_names;
  std::vector<RowError> row_errors;
};

/// Reads hourly records in file order. Bad cells are collected per row;
/// a missing header, unknown schema columns or a repeated timestamp throw FormatError.
ParseResult parse_csv(std::istream& in, const CsvSchema& schema = {});

struct Exclusion {
  Date date;
  std::string reason;
  bool operator==(const Exclusion&) const = default;
};

struct BuildResult {
  Dataset dataset;  // raw
  std::vector<Exclusion> exclusions;
};

/// Maximum run of consecutive missing hours that is filled by linear interpolation.
inline constexpr std::size_t kMaxInterpolatedGap = 2;

/// Segments sorted records into 24-hour day profiles. Short gaps are interpolated
/// between neighbours of the same day; anything else excludes the day.
BuildResult build_days(const std::vector<RawRecord>& records,
                       const std::vector<std::string>& variable_names);

/// Global per-variable min-max scaling to [0, 1].
Dataset normalize(const Dataset& raw);
Dataset denormalize(const Dataset& normalized);

double normalize_value(double x, const VariableRange& r);
double denormalize_value(double x, const VariableRange& r);

}  // namespace repdays
