#pragma once

#include <cmath>
#include <cstdint>

namespace fedshed::rng {

/*
 * SplitMix64 generator with explicit floating-point conversions.
 *
 * Simulations must produce bit-identical streams across runs, thread
 * counts and standard libraries.  std::mt19937_64 is reproducible but the
 * std distributions are not, so the few conversions needed (uniform,
 * Gaussian, exponential) are spelled out here.
 */
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller, one value per call (no caching).
  double gaussian() {
    double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Exp(rate) via inverse CDF.
  double exponential(double rate) {
    double u = uniform();
    return -std::log1p(-u) / rate;
  }

  // Uniform integer in [0, bound). Modulo bias is ~bound/2^64, irrelevant here.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }
};

/*
 * Deterministic stream splitting: one independent stream per
 * (seed, agent, round) triple.  Documented scheme: the seed is combined
 * with the two stream indices through fixed odd multipliers before
 * seeding SplitMix64.
 */
inline SplitMix64 split_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = seed;
  s ^= (a + 1) * 0x9E3779B97F4A7C15ULL;
  s ^= (b + 1) * 0xC2B2AE3D27D4EB4FULL;
  SplitMix64 g(s);
  g.next();  // decorrelate nearby triples
  return g;
}

}  // namespace fedshed::rng
