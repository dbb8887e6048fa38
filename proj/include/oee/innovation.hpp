#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "oee/eca.hpp"

namespace oee {

/// Smallest rule that maps every state of the window onto its successor, or
/// empty when no single fixed rule can. A fixed-rule trajectory is exactly a
/// sequence generated by one rule, so this decides whether the window lies in
/// the set of isolated ECA trajectories of the same width.
std::optional<RuleTable> is_eca_reproducible(std::span<const BitState> states);

/// Innovation: the window is not reproducible by any fixed rule.
bool inn_flag(std::span<const BitState> window);

/// Number of t with rules[t+1] != rules[t].
std::uint64_t count_rule_transitions(std::span<const RuleTable> rules);

/// count_rule_transitions(rules) / 2^w_o.
double innovation_metric(std::span<const RuleTable> rules, unsigned w_o);

struct InnReport {
  bool inn = false;
  std::optional<int> witness_rule;
  std::uint64_t n_rule_transitions = 0;
  double innovation_I = 0.0;
};

InnReport assess_innovation(std::span<const BitState> window, std::span<const RuleTable> rules, unsigned w_o);

/// Every isolated ECA trajectory of a small width: all 256 rules from all 2^w
/// initial states, each recorded up to and including its first repeated
/// state. Answers contiguous-window containment by brute force and is meant
/// as a test oracle.
class CounterfactualOracle {
 public:
  static constexpr unsigned kMaxWidth = 5;

  struct Record {
    std::uint8_t rule = 0;
    std::uint8_t initial_state = 0;
    std::vector<std::uint8_t> states;  ///< states[last] repeats states[cycle_start]
    std::size_t cycle_start = 0;
  };

  static CounterfactualOracle build(unsigned width);

  /// Reads a cache written by save(); throws DataError on a malformed file.
  static CounterfactualOracle load(const std::filesystem::path& path);
  /// Loads the cache when present and valid for `width`, otherwise builds and writes it.
  static CounterfactualOracle load_or_build(const std::filesystem::path& path, unsigned width);

  void save(const std::filesystem::path& path) const;

  /// True when the window occurs contiguously in some enumerated trajectory,
  /// continued periodically around its cycle.
  bool contains(std::span<const BitState> window) const;

  unsigned width() const { return width_; }
  const std::vector<Record>& records() const { return records_; }

  friend bool operator==(const CounterfactualOracle& a, const CounterfactualOracle& b) {
    return a.width_ == b.width_ && a.records_.size() == b.records_.size() && a.records_equal(b);
  }

 private:
  void index_positions();
  bool records_equal(const CounterfactualOracle& other) const;

  unsigned width_ = 0;
  std::vector<Record> records_;
  // For each state value, (record, offset) pairs where it occurs before the repeat.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> positions_;
};

}  // namespace oee
