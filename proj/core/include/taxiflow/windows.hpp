#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxiflow/time_util.hpp"

namespace taxiflow {

enum class WindowLabel { morning_peak, evening_peak, offpeak };
enum class DayClass { weekday, weekend };

std::string_view window_label_name(WindowLabel label);
std::string_view day_class_name(DayClass day_class);

// Hour-of-day sets per window. Defaults: morning rush 6-10 a.m. as hours
// {6,7,8,9}, evening rush 4-8 p.m. as {16,17,18,19}; everything else is
// off-peak. The two peak sets must be disjoint; off-peak is the complement.
struct WindowConfig {
  std::uint32_t morning_mask = (1u << 6) | (1u << 7) | (1u << 8) | (1u << 9);
  std::uint32_t evening_mask = (1u << 16) | (1u << 17) | (1u << 18) | (1u << 19);

  WindowLabel classify(int hour_of_day) const {
    std::uint32_t bit = 1u << hour_of_day;
    if (morning_mask & bit) return WindowLabel::morning_peak;
    if (evening_mask & bit) return WindowLabel::evening_peak;
    return WindowLabel::offpeak;
  }
  std::vector<int> hours_of(WindowLabel label) const;

  // Config file with lines like "morning_peak=6,7,8,9". Throws on overlap.
  static WindowConfig load(const std::string& path);
};

struct HourClass {
  WindowLabel window;
  DayClass day_class;
};

HourClass classify_hour(Timestamp t, const WindowConfig& config = {});

inline constexpr std::size_t kPseudoDayHours = 4;

// One permutation-resampled pseudo-day: a set of distinct hours drawn from a
// single window/day-class pool, breaking any special-day structure.
struct PseudoDay {
  std::array<Timestamp, kPseudoDayHours> hours;
};

// Samples n pseudo-days of kPseudoDayHours distinct hours each (without
// replacement within a pseudo-day, independently across pseudo-days).
// Reproducible for a fixed seed. Throws std::invalid_argument when the pool
// has fewer than kPseudoDayHours hours.
std::vector<PseudoDay> permutation_days(std::span<const Timestamp> pool, std::uint64_t seed,
                                        std::size_t n_pseudo_days);

}  // namespace taxiflow
