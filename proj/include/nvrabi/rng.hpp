#pragma once

#include <cmath>
#include <cstdint>

namespace nvrabi {

// Deterministic counter-based generator. Every Monte Carlo sample owns its
// own stream derived from (master seed, stream tag, index), so results do
// not depend on evaluation order or parallelism degree, and are identical
// across standard-library implementations.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag,
                              std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s) ^ tag;
  s ^= a * 0xff51afd7ed558ccdull;
  std::uint64_t b = splitmix64(s) ^ index;
  s ^= b * 0xc4ceb9fe1a85ec53ull;
  splitmix64(s);
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index)
      : state_(mix_seed(seed, tag, index)) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in (0, 1); never returns exactly 0 or 1
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = kTwoPiLocal * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Exact Poisson draw (multiplication method); intended for modest means.
  std::uint64_t poisson(double mean) {
    double l = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }

 private:
  static constexpr double kTwoPiLocal = 6.283185307179586476925286766559;
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stream tags, one per independent noise/sampling purpose.
namespace rng_tag {
inline constexpr std::uint64_t kEnsembleSample = 0x11;
inline constexpr std::uint64_t kShotNoise = 0x22;
inline constexpr std::uint64_t kLaserNoise = 0x33;
inline constexpr std::uint64_t kBitstream = 0x44;
}  // namespace rng_tag

}  // namespace nvrabi
