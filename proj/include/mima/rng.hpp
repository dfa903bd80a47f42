#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

namespace mima {

// Counter-based normal stream. A variate is addressed by the triple
// (step, particle, channel), so the mapping from address to increment never
// depends on how many draws happened before, and sweeps that change K or J
// stay reproducible. Substreams derived from the same seed are independent.
//
// Construction: SplitMix64 finalizer over the mixed address words gives two
// uniforms, turned into one standard normal by the Box-Muller cosine branch.
// This recipe is fixed; bit-exact replay relies on it.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed, std::uint64_t substream = 0)
      : key_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^
                 mix(substream + 0xbf58476d1ce4e5b9ULL))) {}

  double normal(std::uint64_t step, std::uint64_t particle,
                std::uint64_t channel = 0) const {
    std::uint64_t h = key_;
    h = mix(h ^ mix(step + 0x94d049bb133111ebULL));
    h = mix(h ^ mix(particle + 0xd6e8feb86659fd93ULL));
    h = mix(h ^ mix(channel + 0xa3b195354a39b70dULL));
    const std::uint64_t h2 = mix(h ^ 0xe7037ed1a0b428dbULL);
    // u1 in (0,1], u2 in [0,1)
    const double u1 = (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  NormalStream substream(std::uint64_t id) const {
    NormalStream s(0, 0);
    s.key_ = mix(key_ ^ mix(id + 0xc2b2ae3d27d4eb4fULL));
    return s;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
};

}  // namespace mima
