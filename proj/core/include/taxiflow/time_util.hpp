#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace taxiflow {

// Seconds since 1970-01-01 00:00:00, naive local clock. All trip and weather
// timestamps are local NYC wall time; no timezone arithmetic anywhere.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kSecondsPerMinute = 60;
inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

// Strict "YYYY-MM-DD HH:MM:SS" parse. Rejects bad separators, non-digits and
// out-of-range calendar/clock fields.
std::optional<Timestamp> parse_timestamp(std::string_view s);

// Inverse of parse_timestamp.
std::string format_timestamp(Timestamp t);

Timestamp make_timestamp(int year, int month, int day, int hour = 0, int minute = 0, int second = 0);

Timestamp hour_floor(Timestamp t);
Timestamp day_floor(Timestamp t);

int hour_of_day(Timestamp t);    // 0..23
int minute_of_day(Timestamp t);  // 0..1439
int second_of_day(Timestamp t);  // 0..86399

// 0 = Monday .. 6 = Sunday.
int weekday_index(Timestamp t);
bool is_weekend(Timestamp t);

}  // namespace taxiflow
