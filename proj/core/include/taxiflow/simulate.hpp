#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxiflow/geo.hpp"
#include "taxiflow/ingest.hpp"
#include "taxiflow/metrics.hpp"
#include "taxiflow/shifts.hpp"
#include "taxiflow/weather.hpp"

namespace taxiflow {

struct GaussianComponent {
  double mean_hour = 6.5;      // time of day, hours
  double stddev_hours = 0.75;
  double weight = 1.0;
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::uint32_t n_drivers = 100;
  std::uint32_t days = 7;
  Timestamp start_date = 0;  // midnight of day 0; defaults to 2013-06-03 (a Monday)

  // Each driver belongs to one mixture component (their habitual shift);
  // per-day starts jitter around the component mean.
  std::vector<GaussianComponent> shift_start_mixture = {{6.5, 0.75, 0.55}, {16.5, 0.75, 0.45}};
  double shift_length_mean_h = 8.5;
  double shift_length_stddev_h = 1.0;

  // Demand: pickups per driver-hour are Poisson with this base rate, scaled
  // by the rain multiplier during rainy hours. Idle time between trips is the
  // emergent residual (roughly 1/rate minus the mean trip duration), which
  // keeps pickups-per-driver analytically checkable.
  double base_rate_per_hour = 2.0;
  double rain_multiplier = 1.5;
  double rain_multiplier_weekend = -1.0;  // <0 means same as rain_multiplier

  double rain_probability = 0.3;   // Bernoulli per hour
  double rain_depth_min_mm = 0.5;  // rainy hours: min + Exp(mean) depth
  double rain_depth_mean_mm = 2.0;
  double missing_weather_rate = 0.0;  // chance the reference station row is dropped

  double trip_duration_mean_min = 13.5;
  double trip_duration_stddev_min = 6.0;
  double trip_speed_mean_kmh = 18.0;
  double trip_speed_stddev_kmh = 5.0;

  double fare_base = 2.5;
  double fare_per_km = 1.56;

  // Rule consistency: pickups of one session are forced closer than this cap
  // so synthesized shifts can recover the truth exactly; must stay below the
  // synthesis gap threshold.
  double idle_gap_cap_hours = 7.0;

  // Unobservable cruising before the first pickup. Off by default; when on,
  // truth shift starts precede the first pickup and inferred supply becomes a
  // documented underestimate.
  double pre_cruise_mean_min = 0.0;
  double pre_cruise_stddev_min = 0.0;

  BoundingBox bbox = BoundingBox::nyc();
  struct Hotspot {
    GeoPoint center{40.75, -73.99};
    double sigma_m = 800.0;
    double weight = 1.0;
  };
  std::vector<Hotspot> hotspots = {{{40.75, -73.99}, 800.0, 0.6}, {{40.78, -73.95}, 500.0, 0.4}};

  // Implied mean dropoff-to-pickup gap, 1/rate minus the mean trip duration.
  // Asymptotic: realized gaps approach it when sessions hold many trips and
  // trips are short relative to the inter-pickup time.
  double expected_idle_seconds(bool rainy_weekday = false) const;
  double rate_for(bool rainy, bool weekend) const;

  // key=value config file overriding the defaults above.
  static SimConfig load(const std::string& path);
  void validate() const;  // throws SimError on infeasible settings
};

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrueShift {
  std::uint32_t driver = 0;
  Timestamp start = 0;  // first pickup minus any pre-cruise time
  Timestamp end = 0;    // last dropoff
  std::uint32_t n_trips = 0;
};

struct GroundTruth {
  std::vector<TrueShift> shifts;  // sorted by (driver, start)
  std::map<Timestamp, std::uint32_t> supply_by_hour;
  std::map<Timestamp, double> demand_rate_by_hour;  // per-driver Poisson rate
  std::map<Timestamp, bool> rain_by_hour;
  double expected_pickups = 0.0;  // sum of Poisson means actually scheduled
};

struct SimResult {
  std::vector<TripRecord> trips;  // sorted by pickup time (file order)
  std::vector<WeatherObservation> weather;
  GroundTruth truth;
};

// Deterministic under config.seed: same seed, same bytes.
SimResult simulate(const SimConfig& config);

std::string driver_name(std::uint32_t driver);

struct RecoveryReport {
  std::uint64_t true_shifts = 0;
  std::uint64_t inferred_shifts = 0;
  std::uint64_t drivers_with_exact_count = 0;
  std::uint64_t drivers_total = 0;
  std::uint64_t boundary_exact = 0;  // matched shifts with zero start and end delta
  std::uint64_t matched_shifts = 0;
  double mean_abs_start_delta_s = 0.0;
  double mean_abs_end_delta_s = 0.0;
  double supply_mae = 0.0;           // vs. truth supply, over truth hours
  double demand_ratio_error = 0.0;   // |observed pickups per driver-hour / expected - 1|

  bool exact_partition() const {
    return true_shifts == inferred_shifts && drivers_with_exact_count == drivers_total &&
           boundary_exact == matched_shifts && matched_shifts == true_shifts;
  }
};

// Compares pipeline output against the simulator's ground truth. Throws
// SimError when the driver id sets differ.
RecoveryReport score_recovery(const GroundTruth& truth, std::span<const Shift> inferred,
                              const BinTable& bins);

std::string recovery_csv(const RecoveryReport& report);

}  // namespace taxiflow
