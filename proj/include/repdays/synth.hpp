#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repdays/dataset.hpp"
#include "repdays/date.hpp"

namespace repdays {

enum class VariableKind { Load, Solar, Wind };

std::string to_string(VariableKind k);
VariableKind variable_kind_from_string(const std::string& s);

/// One synthetic variable. All magnitudes are in the variable's own units.
struct VariableSpec {
  std::string name;
  VariableKind kind = VariableKind::Load;
  double level = 1.0;               // mean daily level (load, wind) or clear-sky peak (solar)
  double diurnal_amplitude = 0.3;   // relative size of the intra-day shape
  double seasonal_amplitude = 0.3;  // relative annual swing of the level
  double seasonal_peak_doy = 196;   // day of year where the annual sinusoid peaks
  double noise = 0.02;              // hourly noise sd, relative to level
  double event_probability = 0.0;   // per-day probability of an atypical event (labeled outlier)
  /// Per-day probability of an ordinary, unlabeled disturbance (partly cloudy
  /// day, mild demand shift) that is milder than an event.
  double disturbance_probability = 0.0;
};

struct SynthConfig {
  std::uint64_t seed = 42;
  std::size_t n_days = 730;
  Date start{2019, 1, 1};
  std::vector<VariableSpec> variables;

  /// Load + solar (+ wind) preset; `outlier_probability` is the per-day
  /// probability that some variable has an event.
  static SynthConfig standard(std::uint64_t seed, std::size_t n_days, double outlier_probability,
                              bool with_wind = false);

  /// Throws ArgumentError when a field is out of range.
  void validate() const;
  /// Per-day probability that at least one variable has an event.
  double day_outlier_probability() const;
};

struct DayLabel {
  Date date;
  bool outlier = false;
  std::vector<std::string> events;  // e.g. "solar:cloud"
  bool operator==(const DayLabel&) const = default;
};

struct SynthResult {
  Dataset dataset;  // raw
  std::vector<DayLabel> labels;
  bool operator==(const SynthResult&) const = default;
};

SynthResult generate(const SynthConfig& cfg);

}  // namespace repdays
