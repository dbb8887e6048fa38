#pragma once

// Sampling plans, deduplicated initial-tuple draws, per-execution evaluation
// and the parallel ensemble driver.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oee/complexity.hpp"
#include "oee/variants.hpp"

namespace oee {

/// w_e / w_o as a fraction; Case I plans may give a ratio instead of w_e.
struct WidthRatio {
  unsigned num = 1;
  unsigned den = 1;
  /// floor(w_o * num / den)
  unsigned apply(unsigned w_o) const;
  friend bool operator==(const WidthRatio&, const WidthRatio&) = default;
};

/// The five environment/organism ratios used for Case I scaling studies.
inline constexpr WidthRatio kCaseOneRatios[5] = {{1, 2}, {1, 1}, {3, 2}, {2, 1}, {5, 2}};

enum class LyapunovMode { SinglePosition, AllPositions };

struct SamplePlan {
  Variant variant = Variant::IsolatedECA;
  unsigned w_o = 3;
  std::optional<unsigned> w_e;         ///< explicit environment width
  std::optional<WidthRatio> ratio;     ///< Case I alternative to w_e
  double mu = 0.5;
  std::uint64_t samples = 1000;
  std::uint64_t master_seed = 1;
  std::uint64_t step_cap = 0;          ///< 0 selects default_step_cap per execution

  bool complexity = true;              ///< compute C and k
  LyapunovMode lyapunov_mode = LyapunovMode::SinglePosition;
  unsigned perturb_bit = 0;
  NormParams norm;                     ///< width is filled from the plan

  /// Effective environment width: 0 for Case III / isolated ECA, 8 for Case II,
  /// w_e or floor(ratio * w_o) for Case I.
  unsigned effective_w_e() const;
  /// Throws std::invalid_argument on an inconsistent plan.
  void validate() const;
};

/// Number of distinct initial tuples: 88^2 * 2^w_o * 2^w_e with an environment,
/// 88 * 2^w_o otherwise. Saturates at 2^64 - 1.
std::uint64_t sample_space_size(Variant variant, unsigned w_o, unsigned w_e);

struct InitialTuple {
  std::uint64_t s_o = 0;
  std::uint8_t r_o = 0;
  std::uint64_t s_e = 0;
  std::uint8_t r_e = 0;
  std::uint64_t seed = 0;  ///< per-execution stream key (Case III only; 0 otherwise)
  friend bool operator==(const InitialTuple&, const InitialTuple&) = default;
};

/// Draws plan.samples initial tuples from the seeded stream. Rules come from
/// the 88 canonical representatives and states are uniform. Tuples are
/// distinct for deterministic variants (rejecting plans larger than the
/// space); the stochastic variant allows repeats and gives each execution its
/// own seed.
std::vector<InitialTuple> draw_plan(const SamplePlan& plan);

VariantConfig make_config(const SamplePlan& plan, const InitialTuple& tuple);

struct ExecutionRecord {
  Variant variant = Variant::IsolatedECA;
  unsigned w_o = 0;
  unsigned w_e = 0;
  double mu = 0.0;
  InitialTuple init;

  std::uint64_t t_P = 0;
  std::uint64_t t_r = 0;
  std::uint64_t t_r_rule = 0;
  std::uint64_t t_a = 0;
  std::optional<bool> inn;
  std::optional<bool> ue;
  std::optional<bool> oee;
  std::optional<bool> attractor_ue;
  std::uint64_t n_rule_transitions = 0;
  double innovation_I = 0.0;

  std::optional<std::uint64_t> compressed_bits;
  std::optional<std::uint64_t> norm_bits;
  std::optional<double> C;
  std::optional<double> k;  ///< empty with k_extinct set when the perturbation dies at once
  bool k_extinct = false;
  bool censored = false;

  /// (rule, count) occurrences of r_o over one traversal of the attractor
  /// cycle, ascending by rule. Not serialised; rebuilt by replay.
  std::vector<std::pair<std::uint8_t, std::uint64_t>> attractor_rules;

  friend bool operator==(const ExecutionRecord&, const ExecutionRecord&) = default;
};

/// Runs one execution through simulation, recurrence, innovation and
/// (optionally) complexity. `norm_bits` is required when plan.complexity is set.
ExecutionRecord evaluate(const SamplePlan& plan, const InitialTuple& tuple, std::optional<std::uint64_t> norm_bits);

/// Normalisation parameters of the plan at the full-system width.
NormParams plan_norm_params(const SamplePlan& plan);

/// Draws and evaluates the plan with `threads` workers (0: runtime default).
/// Output order is draw order and identical for every worker count.
std::vector<ExecutionRecord> run_ensemble(const SamplePlan& plan, int threads = 0, NormCache* cache = nullptr);
std::vector<ExecutionRecord> run_ensemble(const SamplePlan& plan, const std::vector<InitialTuple>& tuples, int threads,
                                          NormCache* cache);
/// Single-threaded reference driver.
std::vector<ExecutionRecord> run_ensemble_serial(const SamplePlan& plan, NormCache* cache = nullptr);

/// Recomputes the attractor rule histogram of a record by replaying its
/// initial tuple (deterministic variants only; others are left unchanged).
void replay_attractor_rules(ExecutionRecord& record, std::uint64_t step_cap = 0);

}  // namespace oee
