#include "oee/innovation.hpp"

#include <cmath>

namespace oee {

std::optional<RuleTable> is_eca_reproducible(std::span<const BitState> states) {
  if (states.size() < 2) throw std::invalid_argument("reproducibility needs at least two states");
  const unsigned w = states.front().width();
  std::uint8_t must_be_one = 0;
  std::uint8_t must_be_zero = 0;
  for (std::size_t t = 0; t + 1 < states.size(); ++t) {
    if (states[t].width() != w || states[t + 1].width() != w) throw std::invalid_argument("window mixes state widths");
    const auto masks = triplet_masks(states[t]);
    const std::uint64_t next = states[t + 1].value();
    for (unsigned triplet = 0; triplet < 8; ++triplet) {
      if (masks[triplet] & next) must_be_one |= static_cast<std::uint8_t>(1u << triplet);
      if (masks[triplet] & ~next) must_be_zero |= static_cast<std::uint8_t>(1u << triplet);
    }
    if (must_be_one & must_be_zero) return std::nullopt;
  }
  // Unconstrained outputs are left at 0, which gives the smallest rule number.
  return RuleTable::from_bits(must_be_one);
}

bool inn_flag(std::span<const BitState> window) { return !is_eca_reproducible(window).has_value(); }

std::uint64_t count_rule_transitions(std::span<const RuleTable> rules) {
  std::uint64_t n = 0;
  for (std::size_t t = 0; t + 1 < rules.size(); ++t) n += rules[t + 1] != rules[t];
  return n;
}

double innovation_metric(std::span<const RuleTable> rules, unsigned w_o) {
  return static_cast<double>(count_rule_transitions(rules)) / std::ldexp(1.0, static_cast<int>(w_o));
}

InnReport assess_innovation(std::span<const BitState> window, std::span<const RuleTable> rules, unsigned w_o) {
  InnReport r;
  if (auto witness = is_eca_reproducible(window)) {
    r.witness_rule = witness->number();
  } else {
    r.inn = true;
  }
  r.n_rule_transitions = count_rule_transitions(rules);
  r.innovation_I = innovation_metric(rules, w_o);
  return r;
}

}  // namespace oee
