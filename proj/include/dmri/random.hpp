#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace dmri {

/// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for (stream, index) under a user seed. Serial and per-frame parallel use agree.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/**
 * Portable random source: std::mt19937_64 (whose output sequence is fixed by
 * the C++ standard) with hand-written conversions, because the standard
 * distributions are implementation-defined.
 *
 *   uniform()     top 53 bits * 2^-53, in [0, 1)
 *   below(n)      rejection sampling on the raw 64-bit output
 *   normal_pair() Box-Muller: r = sqrt(-2 ln(1 - u1)), theta = 2 pi u2
 */
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_{seed}
  {
  }

  std::uint64_t next() { return engine_(); }
  double uniform();
  std::uint64_t below(std::uint64_t n);
  std::pair<double, double> normal_pair();

private:
  std::mt19937_64 engine_;
};

} // namespace dmri
