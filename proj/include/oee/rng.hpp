#pragma once

#include <cstdint>

namespace oee {

// 128-bit product type for multiply-high arithmetic (GCC/Clang extension).
__extension__ typedef unsigned __int128 uint128_t;

/// Counter-based stream: the n-th output is a SplitMix64 finaliser applied to
/// key + n * golden-gamma. Streams keyed by (master seed, execution index) are
/// independent of scheduling and reproducible on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t master_seed, std::uint64_t index) : key_(derive_key(master_seed, index)) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t index) {
    return mix(mix(master_seed ^ 0x6A09E667F3BCC909ull) + index * kGamma);
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on [0, bound), unbiased (Lemire's multiply-shift with rejection).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) return next_u64();
    uint128_t m = static_cast<uint128_t>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<uint128_t>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t draws() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace oee
