#pragma once

#include <cmath>
#include <cstdint>

namespace faceval {

// Counter-based pseudo-random generator built on the SplitMix64 output
// function (Steele, Lea & Flood 2014). The k-th draw of a stream is a pure
// function of (key, k), so replicates and permutations can be evaluated in
// any order, or in parallel, and still produce identical values.
//
// Pinned algorithm (needed for cross-implementation golden fixtures):
//   u64(k)     = mix(key + (k + 1) * 0x9E3779B97F4A7C15)
//   mix(z)     : z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//                z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
//   uniform(k) = ((u64(k) >> 11) + 1) * 2^-53          (in (0, 1])
//   normal(k)  = sqrt(-2 ln uniform(2k)) * cos(2 pi uniform(2k + 1))
//   index(k,n) = high 64 bits of u64(k) * n             (in [0, n))
//   stream(id) = CounterRng(mix(key ^ mix(id + 0x9E3779B97F4A7C15)))
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t u64(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGamma);
  }

  // Uniform double in (0, 1]; never 0, so log() is safe.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>((u64(counter) >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; draw k consumes counters 2k and 2k+1.
  double normal(std::uint64_t draw) const {
    const double u1 = uniform(2 * draw);
    const double u2 = uniform(2 * draw + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n) by 64x64 -> high-64 multiply.
  std::uint64_t index(std::uint64_t counter, std::uint64_t n) const {
    const auto wide = static_cast<unsigned __int128>(u64(counter)) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  // Independent child stream; stable under reordering of stream creation.
  CounterRng stream(std::uint64_t id) const {
    return CounterRng(mix(key_ ^ mix(id + kGamma)));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_;
};

}  // namespace faceval
