#pragma once

#include <cstdint>
#include <random>

namespace wcreg {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Reproducible random stream.
///
/// Stream (seed, index) is a std::mt19937_64 seeded with
/// splitmix64(splitmix64(seed) ^ index). Uniform doubles take the top 53 bits
/// of one engine output, so the sequence is fixed across standard libraries
/// (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t index = 0)
      : engine_(splitmix64(splitmix64(seed) ^ index)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [lo, hi] (hi >= lo).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wcreg
