#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace pat {

struct RngSeed {
  std::uint64_t value = 0;
};

/// Deterministic random stream.
///
/// Engine: std::mt19937_64 (fully specified by the standard).
/// Uniform reals: top 53 bits of one engine output scaled by 2^-53.
/// Normals: Marsaglia polar method; the second variate of each accepted pair
/// is cached and returned by the next call.
/// Together these make every stream a pure function of the seed on any
/// conforming standard library. Not thread-safe; give each worker its own.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi].
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal variate.
  double normal();
  /// Seed for an independent child stream.
  RngSeed split() { return RngSeed{engine_()}; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace pat
