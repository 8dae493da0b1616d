#pragma once

#include <cstdint>
#include <random>

namespace cseg {

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the `stream`-th independent stream under a root seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

/// mt19937_64 with platform-independent variate generation. The standard
/// distributions are implementation-defined, so none are used here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  [[nodiscard]] double uniform();
  [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi], unbiased.
  [[nodiscard]] std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller.
  [[nodiscard]] double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cseg
