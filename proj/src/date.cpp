#include "repdays/date.hpp"

#include <charconv>
#include <cstdio>

namespace repdays {

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

bool Date::valid() const {
  using namespace std::chrono;
  return year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}.ok();
}

std::chrono::sys_days Date::to_sys_days() const {
  using namespace std::chrono;
  return sys_days{year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}};
}

Date Date::from_sys_days(std::chrono::sys_days d) {
  std::chrono::year_month_day ymd{d};
  return Date{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())};
}

Date Date::plus_days(int n) const { return from_sys_days(to_sys_days() + std::chrono::days{n}); }

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  unsigned y = 0, m = 0, d = 0;
  if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
      !parse_uint(text.substr(8, 2), d))
    return std::nullopt;
  Date out{int(y), m, d};
  if (!out.valid()) return std::nullopt;
  return out;
}

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  auto date = Date::parse(text.substr(0, 10));
  if (!date) return std::nullopt;
  unsigned hour = 0;
  if (!parse_uint(text.substr(11, 2), hour) || hour > 23) return std::nullopt;
  if (text.substr(13, 3) != ":00") return std::nullopt;
  if (text.size() == 19 && text.substr(16, 3) != ":00") return std::nullopt;
  return Timestamp{*date, hour};
}

std::string Timestamp::iso() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "T%02u:00", hour);
  return date.iso() + buf;
}

}  // namespace repdays
