#pragma once

// Seeded, splittable random number generation for reproducible Monte Carlo.
//
// Each sample index gets its own xoshiro256++ stream whose state is expanded
// with splitmix64 from (seed, index). Runs are therefore bit-identical for a
// fixed seed regardless of how samples are distributed over threads, and no
// implementation-defined std:: distributions are used.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rydqpm {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace detail

class Rng {
 public:
  /// Substream `index` of the generator family identified by `seed`.
  Rng(std::uint64_t seed, std::uint64_t index = 0) {
    std::uint64_t sm = seed ^ (index * 0x9e3779b97f4a7c15ULL + 0x1234567ULL);
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1]; safe as the argument of a log.
  double uniform01_open_low() { return 1.0 - uniform01(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal deviate via Box-Muller (deterministic across platforms).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rydqpm
