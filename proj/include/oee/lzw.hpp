#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oee {

/// LZW over the binary alphabet with initial dictionary {"0" -> 0, "1" -> 1},
/// greedy longest match and an unbounded dictionary. Each emitted code costs
/// ceil(log2(dictionary size at emission)) bits. Symbols are fed one at a time
/// so long trajectories never need to be materialised as strings.
class LzwBitCounter {
 public:
  LzwBitCounter() { reset(); }

  void reset();
  void push(bool bit) {
    if (current_ == kNone) {
      current_ = bit ? 1u : 0u;
      return;
    }
    const std::uint32_t child = trie_[current_][bit];
    if (child != kNone) {
      current_ = child;
      return;
    }
    emit();
    trie_[current_][bit] = static_cast<std::uint32_t>(trie_.size());
    trie_.push_back({kNone, kNone});
    current_ = bit ? 1u : 0u;
  }

  /// Flushes the pending match and returns the total cost in bits.
  std::uint64_t finish();

  std::uint64_t codes_emitted() const { return codes_; }

 private:
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;
  void emit();

  std::vector<std::array<std::uint32_t, 2>> trie_;
  std::uint32_t current_ = kNone;
  std::uint64_t bits_ = 0;
  std::uint64_t codes_ = 0;
};

/// Cost in bits of the LZW encoding of a '0'/'1' string.
std::uint64_t lzw_compress_bits(std::string_view symbols);

std::vector<std::uint32_t> lzw_encode(std::string_view symbols);
std::string lzw_decode(std::span<const std::uint32_t> codes);

}  // namespace oee
