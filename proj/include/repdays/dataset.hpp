#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repdays/date.hpp"

namespace repdays {

inline constexpr std::size_t kHoursPerDay = 24;

/// Dense hours x variables matrix stored row-major (one row per hour).
/// Day profiles and cluster centroids share this representation.
class ProfileMatrix {
 public:
  ProfileMatrix() = default;
  ProfileMatrix(std::size_t hours, std::size_t vars, double fill = 0.0)
      : hours_(hours), vars_(vars), data_(hours * vars, fill) {}

  std::size_t hours() const noexcept { return hours_; }
  std::size_t vars() const noexcept { return vars_; }

  double& operator()(std::size_t h, std::size_t v) { return data_[h * vars_ + v]; }
  double operator()(std::size_t h, std::size_t v) const { return data_[h * vars_ + v]; }

  std::vector<double> column(std::size_t v) const {
    std::vector<double> out(hours_);
    for (std::size_t h = 0; h < hours_; ++h) out[h] = (*this)(h, v);
    return out;
  }

  /// Row-major flattening, i.e. the 24*m vector the Euclidean methods use.
  std::span<const double> flat() const noexcept { return data_; }
  std::span<double> flat() noexcept { return data_; }

  bool operator==(const ProfileMatrix&) const = default;

 private:
  std::size_t hours_ = 0;
  std::size_t vars_ = 0;
  std::vector<double> data_;
};

struct DayProfile {
  Date date;
  ProfileMatrix matrix;  // 24 x m
  std::vector<std::string> variable_names;

  bool operator==(const DayProfile&) const = default;
};

/// Per-variable (min, max) used for global min-max scaling.
struct VariableRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const VariableRange&) const = default;
};

struct Dataset {
  std::vector<DayProfile> days;  // sorted by date, unique
  std::vector<std::string> variable_names;
  /// Empty optional means the values are raw (not normalized).
  std::optional<std::vector<VariableRange>> normalization;

  std::size_t size() const noexcept { return days.size(); }
  std::size_t num_vars() const noexcept { return variable_names.size(); }
  bool normalized() const noexcept { return normalization.has_value(); }

  bool operator==(const Dataset&) const = default;
};

}  // namespace repdays
