#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace repdays {

/// Naive calendar date. No time zone is attached anywhere in the library.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const Date&) const = default;

  bool valid() const;
  std::chrono::sys_days to_sys_days() const;
  static Date from_sys_days(std::chrono::sys_days d);
  Date plus_days(int n) const;

  /// YYYY-MM-DD
  std::string iso() const;
  static std::optional<Date> parse(std::string_view text);
};

/// Hour-resolution naive local timestamp.
struct Timestamp {
  Date date;
  unsigned hour = 0;  // 0..23

  auto operator<=>(const Timestamp&) const = default;

  /// Accepts `YYYY-MM-DDTHH:00` and `YYYY-MM-DD HH:00`, optionally followed by `:00`.
  static std::optional<Timestamp> parse(std::string_view text);
  std::string iso() const;
};

}  // namespace repdays
