#pragma once

// Elementary cellular automaton primitives: rule tables, bit-packed and wide
// periodic states, stepping, rule equivalence and triplet statistics.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oee {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed input files (exit status 3 at the CLI).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Ordered triplet list S3 = [111,110,101,100,011,010,001,000]; entry i is the
/// neighbourhood answered by the i-th most significant bit of a rule number.
inline constexpr std::array<unsigned, 8> kTripletOrder = {7, 6, 5, 4, 3, 2, 1, 0};

/// An ECA rule as an 8-entry output table, stored in Wolfram numbering: bit k
/// of the number is the output for the neighbourhood whose value is k.
class RuleTable {
 public:
  constexpr RuleTable() = default;

  static RuleTable from_number(int n);
  static constexpr RuleTable from_bits(std::uint8_t n) { return RuleTable(n); }

  constexpr std::uint8_t number() const { return bits_; }

  /// Output for the neighbourhood (left, centre, right) packed as l<<2|c<<1|r.
  constexpr bool output(unsigned triplet) const { return (bits_ >> triplet) & 1u; }

  /// Outputs in S3 order (index 0 answers 111, index 7 answers 000).
  std::array<std::uint8_t, 8> outputs() const;

  /// Flips the outputs of every triplet whose bit is set in `triplet_mask`.
  constexpr RuleTable flipped(std::uint8_t triplet_mask) const {
    return RuleTable(static_cast<std::uint8_t>(bits_ ^ triplet_mask));
  }

  friend constexpr bool operator==(RuleTable, RuleTable) = default;

 private:
  constexpr explicit RuleTable(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

RuleTable rule_from_number(int n);
int rule_to_number(RuleTable rule);

/// Periodic binary row of 1..64 cells packed into a word. Cell 0 is the most
/// significant bit of `value()`, so the row "00011110" has value 0x1E.
class BitState {
 public:
  static constexpr unsigned kMaxWidth = 64;

  constexpr BitState() = default;
  BitState(std::uint64_t value, unsigned width);

  static BitState from_string(std::string_view cells);
  static BitState zeros(unsigned width) { return BitState(0, width); }
  static BitState ones(unsigned width) { return BitState(mask_for(width), width); }

  constexpr std::uint64_t value() const { return value_; }
  constexpr unsigned width() const { return width_; }

  bool cell(unsigned p) const { return (value_ >> (width_ - 1 - p)) & 1u; }
  BitState with_cell_flipped(unsigned p) const;

  bool homogeneous() const { return value_ == 0 || value_ == mask_for(width_); }

  /// Cyclic shift by k cells (cell p moves to p+k).
  BitState rotated(unsigned k) const;
  BitState reversed() const;
  BitState negated() const { return BitState(~value_ & mask_for(width_), width_); }

  std::string to_string() const;

  static constexpr std::uint64_t mask_for(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
  }

  friend constexpr bool operator==(const BitState&, const BitState&) = default;

 private:
  std::uint64_t value_ = 0;
  unsigned width_ = 0;
};

/// Unpacked row of arbitrary width; used for rendering large systems.
using WideState = std::vector<std::uint8_t>;

/// One synchronous update with periodic boundaries.
BitState step(RuleTable rule, const BitState& state);

/// Per-cell table lookup; the reference the packed kernel is tested against.
WideState step_reference(RuleTable rule, const WideState& state);

WideState to_wide(const BitState& state);
BitState to_packed(const WideState& state);

RuleTable mirror_rule(RuleTable rule);
RuleTable complement_rule(RuleTable rule);
/// Minimum rule number over the {identity, mirror, complement, both} orbit.
int canonical_rule(int n);
/// The 88 orbit minima in increasing order.
const std::array<std::uint8_t, 88>& canonical_rules();

/// Number of periodic windows holding each neighbourhood, indexed by triplet
/// value (not S3 order). Entries sum to the width.
using TripletCounts = std::array<std::uint32_t, 8>;

TripletCounts triplet_counts(const BitState& state);
/// Packed masks (same bit layout as BitState::value) of the cells whose
/// neighbourhood equals each triplet value.
std::array<std::uint64_t, 8> triplet_masks(const BitState& state);
TripletCounts triplet_counts(const WideState& state);

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num * b.den == b.num * a.den; }
};

/// Relative frequency of each S3 triplet, as exact count/width fractions.
std::array<Fraction, 8> triplet_frequencies(const BitState& state);

int hamming_distance(const BitState& a, const BitState& b);

}  // namespace oee
