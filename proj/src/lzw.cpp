#include "oee/lzw.hpp"

#include <bit>
#include <stdexcept>

namespace oee {

namespace {

std::uint64_t code_width(std::uint64_t dictionary_size) {
  return static_cast<std::uint64_t>(std::bit_width(dictionary_size - 1));
}

void check_symbol(char c) {
  if (c != '0' && c != '1') throw std::invalid_argument("LZW input must be a string over {0,1}");
}

}  // namespace

void LzwBitCounter::reset() {
  trie_.assign(2, {kNone, kNone});
  current_ = kNone;
  bits_ = 0;
  codes_ = 0;
}

void LzwBitCounter::emit() {
  bits_ += code_width(trie_.size());
  ++codes_;
}

std::uint64_t LzwBitCounter::finish() {
  if (current_ != kNone) {
    emit();
    current_ = kNone;
  }
  return bits_;
}

std::uint64_t lzw_compress_bits(std::string_view symbols) {
  if (symbols.empty()) throw std::invalid_argument("LZW input must be nonempty");
  LzwBitCounter counter;
  for (char c : symbols) {
    check_symbol(c);
    counter.push(c == '1');
  }
  return counter.finish();
}

std::vector<std::uint32_t> lzw_encode(std::string_view symbols) {
  constexpr std::uint32_t none = 0xFFFFFFFFu;
  std::vector<std::array<std::uint32_t, 2>> trie(2, {none, none});
  std::vector<std::uint32_t> codes;
  std::uint32_t current = none;
  for (char c : symbols) {
    check_symbol(c);
    const unsigned bit = c == '1';
    if (current == none) {
      current = bit;
      continue;
    }
    if (trie[current][bit] != none) {
      current = trie[current][bit];
      continue;
    }
    codes.push_back(current);
    trie[current][bit] = static_cast<std::uint32_t>(trie.size());
    trie.push_back({none, none});
    current = bit;
  }
  if (current != none) codes.push_back(current);
  return codes;
}

std::string lzw_decode(std::span<const std::uint32_t> codes) {
  std::vector<std::string> dict = {"0", "1"};
  std::string out;
  std::string previous;
  for (std::uint32_t code : codes) {
    std::string entry;
    if (code < dict.size()) {
      entry = dict[code];
    } else if (code == dict.size() && !previous.empty()) {
      entry = previous + previous.front();
    } else {
      throw std::invalid_argument("invalid LZW code stream");
    }
    out += entry;
    if (!previous.empty()) dict.push_back(previous + entry.front());
    previous = std::move(entry);
  }
  return out;
}

}  // namespace oee
