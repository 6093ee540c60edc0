#include "dmri/random.hpp"

#include <cmath>
#include <numbers>

namespace dmri {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n)
{
  // Reject the incomplete top block so every residue is equally likely.
  std::uint64_t const limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

std::pair<double, double> Rng::normal_pair()
{
  double const u1 = 1.0 - uniform(); // (0, 1]
  double const u2 = uniform();
  double const r = std::sqrt(-2.0 * std::log(u1));
  double const theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

} // namespace dmri
