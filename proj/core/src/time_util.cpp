#include "taxiflow/time_util.hpp"

#include <chrono>
#include <cstdio>

namespace taxiflow {

namespace {

// Floor division so that pre-1970 timestamps bin correctly.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && (a < 0) != (b < 0)) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

bool two_digits(std::string_view s, std::size_t pos, int& out) {
  char a = s[pos], b = s[pos + 1];
  if (a < '0' || a > '9' || b < '0' || b > '9') return false;
  out = (a - '0') * 10 + (b - '0');
  return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (s.size() != 19) return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || s[10] != ' ' || s[13] != ':' || s[16] != ':') return std::nullopt;
  int y_hi, y_lo, mo, d, h, mi, sec;
  if (!two_digits(s, 0, y_hi) || !two_digits(s, 2, y_lo)) return std::nullopt;
  if (!two_digits(s, 5, mo) || !two_digits(s, 8, d)) return std::nullopt;
  if (!two_digits(s, 11, h) || !two_digits(s, 14, mi) || !two_digits(s, 17, sec)) return std::nullopt;
  int y = y_hi * 100 + y_lo;
  if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * kSecondsPerDay + h * kSecondsPerHour + mi * kSecondsPerMinute + sec;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  std::int64_t days = floor_div(t, kSecondsPerDay);
  int sod = static_cast<int>(t - days * kSecondsPerDay);
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  int y = static_cast<int>(ymd.year());
  unsigned mo = static_cast<unsigned>(ymd.month());
  unsigned d = static_cast<unsigned>(ymd.day());
  int h = sod / 3600, mi = (sod / 60) % 60, s = sod % 60;
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02d:%02d:%02d", y, mo, d, h, mi, s);
  return std::string(buf, 19);
}

Timestamp make_timestamp(int year, int month, int day, int hour, int minute, int second) {
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * kSecondsPerDay + hour * kSecondsPerHour + minute * kSecondsPerMinute + second;
}

Timestamp hour_floor(Timestamp t) { return floor_div(t, kSecondsPerHour) * kSecondsPerHour; }

Timestamp day_floor(Timestamp t) { return floor_div(t, kSecondsPerDay) * kSecondsPerDay; }

int hour_of_day(Timestamp t) { return static_cast<int>(floor_mod(t, kSecondsPerDay)) / 3600; }

int minute_of_day(Timestamp t) { return static_cast<int>(floor_mod(t, kSecondsPerDay)) / 60; }

int second_of_day(Timestamp t) { return static_cast<int>(floor_mod(t, kSecondsPerDay)); }

int weekday_index(Timestamp t) {
  // 1970-01-01 was a Thursday; Monday-based index.
  std::int64_t days = floor_div(t, kSecondsPerDay);
  return static_cast<int>(floor_mod(days + 3, 7));
}

bool is_weekend(Timestamp t) { return weekday_index(t) >= 5; }

}  // namespace taxiflow
