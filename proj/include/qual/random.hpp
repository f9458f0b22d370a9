#pragma once

#include <cstdint>

namespace qual {

// splitmix64 generator. Small state, good mixing, and trivially seedable,
// which is what matters here: every consumer derives an independent stream
// from a (seed, index) key so that parallel training order cannot change
// results. Not for cryptographic use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream keyed on (seed, index).
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Unbiased uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
};

}  // namespace qual
