#include "repdays/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string_view>

#include "repdays/error.hpp"

namespace repdays {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

ParseResult parse_csv(std::istream& in, const CsvSchema& schema) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;

  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw FormatError("missing header");
  if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_fields(line);
  const std::size_t n_fields = header.size();
  auto find_column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw FormatError("column '" + std::string(name) + "' not found in header");
  };

  const std::size_t ts_col = find_column(schema.timestamp_column);
  std::vector<std::size_t> value_cols;
  if (schema.value_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i == ts_col) continue;
      value_cols.push_back(i);
      result.variable_names.emplace_back(header[i]);
    }
  } else {
    for (const auto& name : schema.value_columns) {
      value_cols.push_back(find_column(name));
      result.variable_names.push_back(name);
    }
  }
  if (value_cols.empty()) throw FormatError("schema names no value columns");

  std::map<Timestamp, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != n_fields) {
      result.row_errors.push_back({line_no, "expected " + std::to_string(n_fields) + " fields, got " +
                                                std::to_string(fields.size())});
      continue;
    }
    auto ts = Timestamp::parse(fields[ts_col]);
    if (!ts) {
      result.row_errors.push_back({line_no, "bad timestamp '" + std::string(fields[ts_col]) + "'"});
      continue;
    }
    RawRecord rec{*ts, {}};
    rec.values.reserve(value_cols.size());
    std::optional<RowError> err;
    for (std::size_t c : value_cols) {
      auto v = parse_number(fields[c]);
      if (!v) {
        err = RowError{line_no, "non-numeric value '" + std::string(fields[c]) + "' in column '" +
                                    std::string(header[c]) + "'"};
        break;
      }
      rec.values.push_back(*v);
    }
    if (err) {
      result.row_errors.push_back(*err);
      continue;
    }
    auto [it, inserted] = seen.emplace(*ts, line_no);
    if (!inserted)
      throw FormatError("duplicate timestamp " + ts->iso() + " at line " + std::to_string(line_no) +
                        " (first seen at line " + std::to_string(it->second) + ")");
    result.records.push_back(std::move(rec));
  }
  return result;
}

BuildResult build_days(const std::vector<RawRecord>& records,
                       const std::vector<std::string>& variable_names) {
  const std::size_t m = variable_names.size();
  if (m == 0) throw ArgumentError("build_days: no variables");

  BuildResult out;
  out.dataset.variable_names = variable_names;

  std::size_t i = 0;
  while (i < records.size()) {
    const Date date = records[i].timestamp.date;
    std::array<const RawRecord*, kHoursPerDay> slots{};
    std::size_t present = 0;
    for (; i < records.size() && records[i].timestamp.date == date; ++i) {
      const auto& r = records[i];
      if (r.values.size() != m) throw ArgumentError("build_days: record width does not match variable count");
      if (i > 0 && !(records[i - 1].timestamp < r.timestamp))
        throw ArgumentError("build_days: records not sorted by timestamp at " + r.timestamp.iso());
      slots[r.timestamp.hour] = &r;
      ++present;
    }

    DayProfile day{date, ProfileMatrix(kHoursPerDay, m), variable_names};
    std::optional<std::string> reason;
    std::size_t h = 0;
    while (h < kHoursPerDay && !reason) {
      if (slots[h]) {
        for (std::size_t v = 0; v < m; ++v) day.matrix(h, v) = slots[h]->values[v];
        ++h;
        continue;
      }
      std::size_t end = h;
      while (end < kHoursPerDay && !slots[end]) ++end;
      const std::size_t gap = end - h;
      if (h == 0 || end == kHoursPerDay) {
        reason = std::to_string(present) + " of 24 hours present; gap at day boundary";
      } else if (gap > kMaxInterpolatedGap) {
        reason = std::to_string(present) + " of 24 hours present; gap of " + std::to_string(gap) +
                 " hours exceeds " + std::to_string(kMaxInterpolatedGap);
      } else {
        const RawRecord& lo = *slots[h - 1];
        const RawRecord& hi = *slots[end];
        const double span = double(gap + 1);
        for (std::size_t k = h; k < end; ++k) {
          const double t = double(k - (h - 1)) / span;
          for (std::size_t v = 0; v < m; ++v) day.matrix(k, v) = lo.values[v] + t * (hi.values[v] - lo.values[v]);
        }
        h = end;
      }
    }
    if (reason)
      out.exclusions.push_back({date, *reason});
    else
      out.dataset.days.push_back(std::move(day));
  }
  if (out.dataset.days.empty()) throw DataError("empty dataset: no complete days");
  return out;
}

double normalize_value(double x, const VariableRange& r) { return (x - r.min) / (r.max - r.min); }
double denormalize_value(double x, const VariableRange& r) { return r.min + x * (r.max - r.min); }

Dataset normalize(const Dataset& raw) {
  if (raw.normalized()) throw ArgumentError("normalize: dataset is already normalized");
  if (raw.days.empty()) throw ArgumentError("normalize: empty dataset");
  const std::size_t m = raw.num_vars();
  std::vector<VariableRange> ranges(m, VariableRange{INFINITY, -INFINITY});
  for (const auto& d : raw.days)
    for (std::size_t h = 0; h < d.matrix.hours(); ++h)
      for (std::size_t v = 0; v < m; ++v) {
        ranges[v].min = std::min(ranges[v].min, d.matrix(h, v));
        ranges[v].max = std::max(ranges[v].max, d.matrix(h, v));
      }
  for (std::size_t v = 0; v < m; ++v)
    if (!(ranges[v].max > ranges[v].min))
      throw DataError("variable '" + raw.variable_names[v] + "' is constant; cannot normalize");

  Dataset out = raw;
  for (auto& d : out.days)
    for (std::size_t h = 0; h < d.matrix.hours(); ++h)
      for (std::size_t v = 0; v < m; ++v) {
        double x = normalize_value(d.matrix(h, v), ranges[v]);
        // guard against 1 ulp overshoot from the division
        d.matrix(h, v) = std::clamp(x, 0.0, 1.0);
      }
  out.normalization = std::move(ranges);
  return out;
}

Dataset denormalize(const Dataset& normalized) {
  if (!normalized.normalized()) throw ArgumentError("denormalize: dataset is not normalized");
  Dataset out = normalized;
  const auto& ranges = *normalized.normalization;
  for (auto& d : out.days)
    for (std::size_t h = 0; h < d.matrix.hours(); ++h)
      for (std::size_t v = 0; v < ranges.size(); ++v) d.matrix(h, v) = denormalize_value(d.matrix(h, v), ranges[v]);
  out.normalization.reset();
  return out;
}

}  // namespace repdays
