#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace lend::rng {

// Keyed counter-based generator. Every draw is a pure function of
// (seed, stream, counter), so consumers can sample in any order and
// two runs with the same seed produce bit-identical values on any
// platform. The standard <random> distributions are deliberately
// avoided because their output is implementation-defined.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent draw streams; keep values distinct so purposes never collide.
enum Stream : std::uint64_t {
  kFeatures = 1,
  kNoise = 2,
  kModelInit = 3,
  kShuffle = 4,
  kDerive = 5,
  kTest = 99,
};

inline constexpr std::uint64_t keyed(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t counter) {
  return splitmix64(splitmix64(seed ^ stream * kGolden) ^ counter);
}

// Maps 53 random bits onto [0, 1).
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double keyed_uniform(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t counter) {
  return to_unit(keyed(seed, stream, counter));
}

// Standard normal via Box-Muller; consumes two counters per value.
inline double keyed_gaussian(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) {
  const std::uint64_t b1 = keyed(seed, stream, 2 * counter);
  const std::uint64_t b2 = keyed(seed, stream, 2 * counter + 1);
  const double u1 = (static_cast<double>(b1 >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = to_unit(b2);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Sequential stream for shuffles and other order-dependent draws.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_++); }

  // Unbiased draw in [0, n) via rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t wrap = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
    if (wrap == 0) return next() % n;
    const std::uint64_t limit = 0 - wrap;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

 private:
  std::uint64_t state_;
};

template <typename T>
void shuffle(std::vector<T>& values, SplitMix& gen) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[gen.below(i)]);
  }
}

}  // namespace lend::rng
