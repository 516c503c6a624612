#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gpdr {

// splitmix64 finalizer, used to derive independent stream seeds from
// (master seed, stream label, indices) as a pure function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ mix64(a));
  h = mix64(h ^ mix64(b));
  h = mix64(h ^ mix64(c));
  return h;
}

// Stream labels keep unrelated random decisions on disjoint seeds.
namespace stream {
inline constexpr std::uint64_t init = 0x11;
inline constexpr std::uint64_t breed = 0x12;
inline constexpr std::uint64_t repair = 0x13;
inline constexpr std::uint64_t simulation = 0x14;
inline constexpr std::uint64_t run_cell = 0x15;
}  // namespace stream

// Generation label reserved for held-out test replications; training
// generations use their index and never reach this value.
inline constexpr std::uint64_t kTestGeneration = ~0ULL;

// mt19937_64 plus hand-written transforms, so every draw consumes a fixed
// number of engine outputs regardless of platform or standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds; modulo bias is negligible at 64 bits
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal() {
    // Box-Muller without caching: exactly two uniforms per draw
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

  int poisson(double lambda) {
    // Knuth's product method; session rates here are at most a few
    double limit = std::exp(-lambda);
    int k = -1;
    double prod = 1.0;
    do {
      ++k;
      prod *= uniform();
    } while (prod > limit);
    return k;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gpdr
