#pragma once

#include <cstdint>

namespace mfunc {

// Counter-based generator built on the SplitMix64 finalizer (Steele, Lea,
// Flood 2014).  Each variate is a pure function of (seed, stream, counter),
// so draws are independent of evaluation order and thread layout.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t word(std::uint64_t stream, std::uint64_t counter) const {
    return mix(mix(mix(seed_) ^ stream * 0xD1342543DE82EF95ull) + counter);
  }

  //! Uniform double in [0, 1) with 53 random bits.
  double unit(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(word(stream, counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
};

}  // namespace mfunc
