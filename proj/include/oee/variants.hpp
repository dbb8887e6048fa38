#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "oee/eca.hpp"
#include "oee/rng.hpp"

namespace oee {

enum class Variant { CaseI, CaseII, CaseIII, IsolatedECA };

/// CLI names: case1, case2, case3, eca.
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

constexpr bool is_deterministic(Variant v) { return v != Variant::CaseIII; }
constexpr bool has_environment(Variant v) { return v == Variant::CaseI || v == Variant::CaseII; }

inline constexpr unsigned kCaseTwoEnvWidth = 8;

struct VariantConfig {
  Variant variant = Variant::IsolatedECA;
  BitState s_o;
  RuleTable r_o;
  std::optional<BitState> s_e;
  std::optional<RuleTable> r_e;
  double mu = 0.0;
  std::uint64_t seed = 0;

  unsigned w_o() const { return s_o.width(); }
  unsigned w_e() const { return s_e ? s_e->width() : 0; }

  /// Throws std::invalid_argument when the fields do not fit the variant.
  void validate() const;

  static VariantConfig isolated(BitState s_o, RuleTable r_o);
  static VariantConfig case1(BitState s_o, RuleTable r_o, BitState s_e, RuleTable r_e);
  static VariantConfig case2(BitState s_o, RuleTable r_o, BitState s_e, RuleTable r_e);
  static VariantConfig case3(BitState s_o, RuleTable r_o, double mu, std::uint64_t seed);
};

struct SystemSnapshot {
  std::uint64_t t = 0;
  BitState s_o;
  RuleTable r_o;
  std::optional<BitState> s_e;
  std::optional<RuleTable> r_e;

  /// Equality of the evolving part (s_o, r_o, s_e); r_e never changes.
  bool same_state(const SystemSnapshot& other) const {
    return s_o == other.s_o && r_o == other.r_o && s_e == other.s_e;
  }
};

struct Trajectory {
  std::vector<SystemSnapshot> snapshots;
  bool cap_hit = false;
  /// Index of the snapshot at which the stop condition fired (the repeated
  /// snapshot, or the first homogeneous organism for the stochastic variant).
  /// Snapshots after it are an optional observation tail.
  std::size_t stop_index = 0;

  std::vector<BitState> organism_states(std::size_t first, std::size_t last) const;
  std::vector<RuleTable> organism_rules(std::size_t first, std::size_t last) const;
};

/// Flip every output whose triplet is present in s_o with relative frequency
/// at least its frequency in s_e. Frequencies compare as cross-multiplied counts.
RuleTable case1_rule_update(const BitState& s_o, RuleTable r_o, const BitState& s_e);
RuleTable case1_rule_update(const TripletCounts& organism, unsigned w_o, const TripletCounts& environment, unsigned w_e,
                            RuleTable r_o);

/// Reads an 8-cell environment as a rule number, cell 0 answering 111.
RuleTable case2_rule_update(const BitState& s_e);

/// Flips each output independently when its draw falls below mu. Consumes
/// exactly eight draws, for S3 positions 1..8 in order.
RuleTable case3_rule_update(RuleTable r_o, double mu, CounterRng& rng);

SystemSnapshot initial_snapshot(const VariantConfig& config);

/// Rule first, then state: r_o(t+1) from time-t quantities, s_o(t+1) =
/// step(r_o(t+1), s_o(t)), s_e(t+1) = step(r_e, s_e(t)).
SystemSnapshot system_step(const VariantConfig& config, const SystemSnapshot& snap, CounterRng& rng);

/// Snapshot-space pigeonhole bound 256 * 2^(w_o + w_e) + 1 (saturating) for
/// deterministic variants, 10^6 for the stochastic one.
std::uint64_t default_step_cap(const VariantConfig& config);

struct TrajectoryOptions {
  std::uint64_t cap = 0;   ///< 0 selects default_step_cap
  std::uint64_t tail = 0;  ///< extra steps simulated after the stop condition
};

/// Iterates system_step until the first repeated snapshot (deterministic
/// variants) or the first homogeneous organism (stochastic variant), or until
/// `cap` steps have elapsed, in which case cap_hit is set.
Trajectory run_trajectory(const VariantConfig& config, std::uint64_t cap);
Trajectory run_trajectory(const VariantConfig& config, const TrajectoryOptions& options);

/// Unpacked setup for rendering organisms wider than 64 cells.
struct WideConfig {
  Variant variant = Variant::CaseI;
  WideState s_o;
  RuleTable r_o;
  WideState s_e;
  RuleTable r_e;
  double mu = 0.0;
  std::uint64_t seed = 0;
};

struct WideRun {
  std::vector<WideState> organism;
  std::vector<WideState> environment;
  std::vector<RuleTable> rules;
};

/// Fixed-length run of `rows` snapshots (t = 0 .. rows-1), no cycle detection.
WideRun run_wide(const WideConfig& config, std::size_t rows);

}  // namespace oee
