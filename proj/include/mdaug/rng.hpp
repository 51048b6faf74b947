#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace mdaug {

// All randomness in the library flows through this generator so that results
// are reproducible bit-for-bit across platforms, compilers and thread
// schedules. The core is splitmix64; std::mt19937 + std:: distributions are
// deliberately avoided because their output is implementation-defined.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream seed for sample `index` under run seed `seed`:
//
//   stream(seed, index) = mix64(seed ^ mix64(index))
//
// Every sample owns an independent stream derived only from (seed, index),
// so worker count and scheduling order can never change a sample's draws.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // {0, ..., n-1}. Modulo bias is < n / 2^64, far below anything observable
  // for the crop offsets and shuffles this is used for.
  std::uint64_t uniform_int(std::uint64_t n) { return n ? next_u64() % n : 0; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller without spare caching: every call consumes exactly two draws,
  // which keeps the stream position a pure function of the call count.
  double normal(double mu, double sigma) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by the library Rng.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace mdaug
