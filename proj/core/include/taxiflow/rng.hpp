#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace taxiflow {

// All random draws go through these helpers instead of <random> distributions:
// the standard distributions are implementation-defined, and seeded runs must
// produce byte-identical outputs everywhere.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed for a keyed sub-task.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key) {
  return splitmix64(master ^ splitmix64(key + 0x5851f42d4c957f2dULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1): 53-bit mantissa.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n) by rejection; deterministic across platforms.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; one value per call (the spare is discarded to keep the
  // draw sequence independent of call sites).
  double normal(double mean, double stddev) {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + stddev * z;
  }

  double exponential(double mean) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u) * mean;
  }

  // Knuth multiplication method, chunked so exp(-lambda) cannot underflow.
  std::uint32_t poisson(double lambda) {
    std::uint32_t k = 0;
    while (lambda > 30.0) {
      k += poisson_small(30.0);
      lambda -= 30.0;
    }
    return k + poisson_small(lambda);
  }

 private:
  std::uint32_t poisson_small(double lambda) {
    if (lambda <= 0.0) return 0;
    double limit = std::exp(-lambda);
    std::uint32_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  std::mt19937_64 engine_;
};

}  // namespace taxiflow
