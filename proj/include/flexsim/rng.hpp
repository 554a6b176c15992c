#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flexsim {

// Finalizer from the splitmix64 generator, used to derive substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seedable 64-bit generator (mt19937_64) with hierarchically derived
// substreams: stream(root, purpose, index) is a pure function of its
// arguments, so adding or removing consumers never perturbs other streams.
// All variate transforms are done explicitly (inverse CDF, Box-Muller) to
// keep runs byte-reproducible regardless of libstdc++ distribution details.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  static Rng stream(std::uint64_t root, std::uint64_t purpose, std::uint64_t index) {
    return Rng(splitmix64(root ^ splitmix64(purpose ^ splitmix64(index))));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (~0ull / bound);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

  // Standard normal via Box-Muller; two uniforms per draw, no rejection.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace flexsim
