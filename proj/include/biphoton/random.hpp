#pragma once

#include <cstdint>
#include <random>

namespace biphoton {

/// splitmix64 mixing of a seed with stream indices. Used to derive
/// independent, reproducible substreams (per setting, per resample).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Seeded generator with platform-independent sampling routines; the standard
/// library distributions are implementation-defined, which would make output
/// files differ between toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Inversion below mean 30, rounded normal approximation above.
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace biphoton
