#pragma once

#include <cstdint>

namespace srecop {

/// xoshiro256++ generator. Streams are spawned from a master seed with a
/// splitmix64 mix of (seed, stream, substream), so draws attached to a given
/// BAU or replicate do not depend on how work is scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
    reseed(mix(mix(mix(0x9e3779b97f4a7c15ULL ^ seed, seed), stream), substream));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();                              // standard Gaussian, inverse-CDF draw
  double gamma(double shape, double scale);     // Marsaglia-Tsang

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t mix(std::uint64_t state, std::uint64_t value) {
    std::uint64_t z = state + 0x9e3779b97f4a7c15ULL + value;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : s_) {
      s += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t s_[4];
};

}  // namespace srecop
