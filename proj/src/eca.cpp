#include "oee/eca.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace oee {

RuleTable RuleTable::from_number(int n) {
  if (n < 0 || n > 255) throw std::invalid_argument("rule number out of range 0..255: " + std::to_string(n));
  return RuleTable(static_cast<std::uint8_t>(n));
}

std::array<std::uint8_t, 8> RuleTable::outputs() const {
  std::array<std::uint8_t, 8> out{};
  for (std::size_t i = 0; i < 8; ++i) out[i] = output(kTripletOrder[i]) ? 1 : 0;
  return out;
}

RuleTable rule_from_number(int n) { return RuleTable::from_number(n); }
int rule_to_number(RuleTable rule) { return rule.number(); }

BitState::BitState(std::uint64_t value, unsigned width) : value_(value), width_(width) {
  if (width < 1 || width > kMaxWidth) throw std::invalid_argument("state width must be in 1..64");
  if ((value & ~mask_for(width)) != 0) throw std::invalid_argument("state value has bits beyond its width");
}

BitState BitState::from_string(std::string_view cells) {
  std::uint64_t v = 0;
  for (char c : cells) {
    if (c != '0' && c != '1') throw std::invalid_argument("state string must contain only 0 and 1");
    v = (v << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return BitState(v, static_cast<unsigned>(cells.size()));
}

BitState BitState::with_cell_flipped(unsigned p) const {
  if (p >= width_) throw std::out_of_range("cell index beyond state width");
  return BitState(value_ ^ (std::uint64_t{1} << (width_ - 1 - p)), width_);
}

namespace {

// Bit b of the result holds bit b+1 of v (wrapping): the left neighbour of each cell.
inline std::uint64_t left_neighbours(std::uint64_t v, unsigned w) {
  return (v >> 1) | ((v & 1u) << (w - 1));
}

inline std::uint64_t right_neighbours(std::uint64_t v, unsigned w) {
  return ((v << 1) | (v >> (w - 1))) & BitState::mask_for(w);
}

// Mask of positions whose neighbourhood equals `triplet`.
inline std::uint64_t minterm(unsigned triplet, std::uint64_t l, std::uint64_t c, std::uint64_t r, std::uint64_t m) {
  const std::uint64_t a = (triplet & 4u) ? l : ~l;
  const std::uint64_t b = (triplet & 2u) ? c : ~c;
  const std::uint64_t d = (triplet & 1u) ? r : ~r;
  return a & b & d & m;
}

}  // namespace

BitState BitState::rotated(unsigned k) const {
  BitState s = *this;
  k %= width_;
  for (unsigned i = 0; i < k; ++i) s.value_ = left_neighbours(s.value_, width_);
  return s;
}

BitState BitState::reversed() const {
  std::uint64_t v = 0;
  for (unsigned p = 0; p < width_; ++p) v |= static_cast<std::uint64_t>(cell(p)) << p;
  return BitState(v, width_);
}

std::string BitState::to_string() const {
  std::string s(width_, '0');
  for (unsigned p = 0; p < width_; ++p) s[p] = cell(p) ? '1' : '0';
  return s;
}

BitState step(RuleTable rule, const BitState& state) {
  const unsigned w = state.width();
  if (w == 0) throw std::invalid_argument("cannot step an empty state");
  const std::uint64_t m = BitState::mask_for(w);
  const std::uint64_t c = state.value();
  const std::uint64_t l = left_neighbours(c, w);
  const std::uint64_t r = right_neighbours(c, w);
  std::uint64_t out = 0;
  for (unsigned t = 0; t < 8; ++t) {
    if (rule.output(t)) out |= minterm(t, l, c, r, m);
  }
  return BitState(out, w);
}

WideState step_reference(RuleTable rule, const WideState& state) {
  const std::size_t w = state.size();
  if (w == 0) throw std::invalid_argument("cannot step an empty state");
  WideState next(w);
  for (std::size_t p = 0; p < w; ++p) {
    const unsigned left = state[(p + w - 1) % w];
    const unsigned right = state[(p + 1) % w];
    next[p] = rule.output((left << 2) | (static_cast<unsigned>(state[p]) << 1) | right) ? 1 : 0;
  }
  return next;
}

WideState to_wide(const BitState& state) {
  WideState out(state.width());
  for (unsigned p = 0; p < state.width(); ++p) out[p] = state.cell(p) ? 1 : 0;
  return out;
}

BitState to_packed(const WideState& state) {
  if (state.empty() || state.size() > BitState::kMaxWidth) throw std::invalid_argument("wide state does not fit a packed state");
  std::uint64_t v = 0;
  for (auto cell : state) v = (v << 1) | (cell ? 1u : 0u);
  return BitState(v, static_cast<unsigned>(state.size()));
}

RuleTable mirror_rule(RuleTable rule) {
  std::uint8_t out = 0;
  for (unsigned t = 0; t < 8; ++t) {
    const unsigned swapped = ((t & 1u) << 2) | (t & 2u) | ((t >> 2) & 1u);
    if (rule.output(swapped)) out |= static_cast<std::uint8_t>(1u << t);
  }
  return RuleTable::from_bits(out);
}

RuleTable complement_rule(RuleTable rule) {
  std::uint8_t out = 0;
  for (unsigned t = 0; t < 8; ++t) {
    if (!rule.output(7u - t)) out |= static_cast<std::uint8_t>(1u << t);
  }
  return RuleTable::from_bits(out);
}

int canonical_rule(int n) {
  const RuleTable r = rule_from_number(n);
  const RuleTable m = mirror_rule(r);
  const RuleTable c = complement_rule(r);
  const RuleTable mc = mirror_rule(c);
  return std::min({r.number(), m.number(), c.number(), mc.number()});
}

const std::array<std::uint8_t, 88>& canonical_rules() {
  static const std::array<std::uint8_t, 88> reps = [] {
    std::set<int> found;
    for (int n = 0; n < 256; ++n) found.insert(canonical_rule(n));
    if (found.size() != 88) throw std::logic_error("rule equivalence produced an unexpected orbit count");
    std::array<std::uint8_t, 88> out{};
    std::size_t i = 0;
    for (int n : found) out[i++] = static_cast<std::uint8_t>(n);
    return out;
  }();
  return reps;
}

std::array<std::uint64_t, 8> triplet_masks(const BitState& state) {
  const unsigned w = state.width();
  const std::uint64_t m = BitState::mask_for(w);
  const std::uint64_t c = state.value();
  const std::uint64_t l = left_neighbours(c, w);
  const std::uint64_t r = right_neighbours(c, w);
  std::array<std::uint64_t, 8> masks{};
  for (unsigned t = 0; t < 8; ++t) masks[t] = minterm(t, l, c, r, m);
  return masks;
}

TripletCounts triplet_counts(const BitState& state) {
  const auto masks = triplet_masks(state);
  TripletCounts counts{};
  for (unsigned t = 0; t < 8; ++t) counts[t] = static_cast<std::uint32_t>(std::popcount(masks[t]));
  return counts;
}

TripletCounts triplet_counts(const WideState& state) {
  const std::size_t w = state.size();
  TripletCounts counts{};
  for (std::size_t p = 0; p < w; ++p) {
    const unsigned t = (static_cast<unsigned>(state[(p + w - 1) % w]) << 2) |
                       (static_cast<unsigned>(state[p]) << 1) | static_cast<unsigned>(state[(p + 1) % w]);
    ++counts[t];
  }
  return counts;
}

std::array<Fraction, 8> triplet_frequencies(const BitState& state) {
  const TripletCounts counts = triplet_counts(state);
  std::array<Fraction, 8> out{};
  for (std::size_t i = 0; i < 8; ++i) out[i] = Fraction{counts[kTripletOrder[i]], state.width()};
  return out;
}

int hamming_distance(const BitState& a, const BitState& b) {
  if (a.width() != b.width()) throw std::invalid_argument("hamming distance needs equal widths");
  return std::popcount(a.value() ^ b.value());
}

}  // namespace oee
