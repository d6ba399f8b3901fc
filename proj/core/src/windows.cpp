#include "taxiflow/windows.hpp"

#include <algorithm>

#include "taxiflow/csv.hpp"
#include "taxiflow/rng.hpp"

namespace taxiflow {

std::string_view window_label_name(WindowLabel label) {
  switch (label) {
    case WindowLabel::morning_peak: return "morning_peak";
    case WindowLabel::evening_peak: return "evening_peak";
    case WindowLabel::offpeak: return "offpeak";
  }
  return "?";
}

std::string_view day_class_name(DayClass day_class) {
  return day_class == DayClass::weekday ? "weekday" : "weekend";
}

std::vector<int> WindowConfig::hours_of(WindowLabel label) const {
  std::vector<int> hours;
  for (int h = 0; h < 24; ++h)
    if (classify(h) == label) hours.push_back(h);
  return hours;
}

WindowConfig WindowConfig::load(const std::string& path) {
  LineReader reader(path);
  if (!reader.is_open()) throw std::invalid_argument("cannot open window config: " + path);
  WindowConfig config;
  std::string_view line;
  std::vector<std::string_view> parts;
  while (reader.next(line)) {
    line = trim(line);
    if (line.empty() || LineReader::is_comment(line)) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("window config: expected label=hours");
    std::string_view key = trim(line.substr(0, eq));
    split_fields(line.substr(eq + 1), ',', parts);
    std::uint32_t mask = 0;
    for (std::string_view p : parts) {
      std::int64_t h;
      if (!parse_i64(trim(p), h) || h < 0 || h > 23)
        throw std::invalid_argument("window config: bad hour '" + std::string(p) + "'");
      mask |= 1u << h;
    }
    if (key == "morning_peak") {
      config.morning_mask = mask;
    } else if (key == "evening_peak") {
      config.evening_mask = mask;
    } else {
      throw std::invalid_argument("window config: unknown label '" + std::string(key) + "'");
    }
  }
  if (config.morning_mask & config.evening_mask)
    throw std::invalid_argument("window config: peak hour sets overlap");
  return config;
}

HourClass classify_hour(Timestamp t, const WindowConfig& config) {
  return HourClass{config.classify(hour_of_day(t)),
                   is_weekend(t) ? DayClass::weekend : DayClass::weekday};
}

std::vector<PseudoDay> permutation_days(std::span<const Timestamp> pool, std::uint64_t seed,
                                        std::size_t n_pseudo_days) {
  if (pool.size() < kPseudoDayHours)
    throw std::invalid_argument("pseudo-day pool smaller than " + std::to_string(kPseudoDayHours));
  Rng rng(seed);
  std::vector<PseudoDay> days;
  days.reserve(n_pseudo_days);
  std::array<std::size_t, kPseudoDayHours> picked{};
  for (std::size_t d = 0; d < n_pseudo_days; ++d) {
    std::size_t count = 0;
    while (count < kPseudoDayHours) {
      std::size_t candidate = static_cast<std::size_t>(rng.below(pool.size()));
      bool duplicate = false;
      for (std::size_t i = 0; i < count; ++i) duplicate |= picked[i] == candidate;
      if (!duplicate) picked[count++] = candidate;
    }
    PseudoDay day;
    for (std::size_t i = 0; i < kPseudoDayHours; ++i) day.hours[i] = pool[picked[i]];
    std::sort(day.hours.begin(), day.hours.end());
    days.push_back(day);
  }
  return days;
}

}  // namespace taxiflow
