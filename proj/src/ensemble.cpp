#include "oee/ensemble.hpp"

#include <algorithm>
#include <array>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

#include <omp.h>

#include "oee/innovation.hpp"
#include "oee/recurrence.hpp"
#include "oee/rng.hpp"

namespace oee {

namespace {

constexpr std::uint64_t kCanonicalCount = 88;
// Stream index reserved for tuple draws; execution streams use their draw index.
constexpr std::uint64_t kDrawStream = ~std::uint64_t{0};

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  const uint128_t p = static_cast<uint128_t>(a) * b;
  return p > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                       : static_cast<std::uint64_t>(p);
}

std::uint64_t saturating_pow2(unsigned e) {
  return e >= 64 ? std::numeric_limits<std::uint64_t>::max() : std::uint64_t{1} << e;
}

VariantConfig config_for(Variant variant, unsigned w_o, unsigned w_e, double mu, const InitialTuple& t) {
  const BitState s_o(t.s_o, w_o);
  const RuleTable r_o = RuleTable::from_bits(t.r_o);
  switch (variant) {
    case Variant::CaseI: return VariantConfig::case1(s_o, r_o, BitState(t.s_e, w_e), RuleTable::from_bits(t.r_e));
    case Variant::CaseII: return VariantConfig::case2(s_o, r_o, BitState(t.s_e, w_e), RuleTable::from_bits(t.r_e));
    case Variant::CaseIII: return VariantConfig::case3(s_o, r_o, mu, t.seed);
    case Variant::IsolatedECA: return VariantConfig::isolated(s_o, r_o);
  }
  throw std::logic_error("unhandled variant");
}

struct TupleHash {
  std::size_t operator()(const InitialTuple& t) const {
    return CounterRng::mix(t.s_o * 0x9E3779B97F4A7C15ull ^
                           CounterRng::mix(t.s_e + (std::uint64_t{t.r_o} << 8 | t.r_e)));
  }
};

// Maps an index of the full tuple space onto its tuple (dense draws only).
InitialTuple decode_tuple(std::uint64_t index, bool env, unsigned w_o, unsigned w_e) {
  const auto& reps = canonical_rules();
  InitialTuple t;
  if (env) {
    t.s_e = index & BitState::mask_for(w_e);
    index >>= w_e;
  }
  t.s_o = index & BitState::mask_for(w_o);
  index >>= w_o;
  if (env) {
    t.r_e = reps[index % kCanonicalCount];
    index /= kCanonicalCount;
  }
  t.r_o = reps[index];
  return t;
}

std::vector<std::pair<std::uint8_t, std::uint64_t>> cycle_rule_histogram(const Trajectory& traj, const CycleInfo& cycle) {
  std::array<std::uint64_t, 256> counts{};
  for (std::uint64_t t = cycle.pre_period; t < cycle.pre_period + cycle.period; ++t) ++counts[traj.snapshots[t].r_o.number()];
  std::vector<std::pair<std::uint8_t, std::uint64_t>> out;
  for (unsigned r = 0; r < 256; ++r) {
    if (counts[r]) out.emplace_back(static_cast<std::uint8_t>(r), counts[r]);
  }
  return out;
}

}  // namespace

unsigned WidthRatio::apply(unsigned w_o) const {
  if (den == 0) throw std::invalid_argument("width ratio denominator must be positive");
  return static_cast<unsigned>(std::uint64_t{w_o} * num / den);
}

unsigned SamplePlan::effective_w_e() const {
  switch (variant) {
    case Variant::CaseIII:
    case Variant::IsolatedECA: return 0;
    case Variant::CaseII: return kCaseTwoEnvWidth;
    case Variant::CaseI:
      if (w_e) return *w_e;
      if (ratio) return ratio->apply(w_o);
      throw std::invalid_argument("case1 plans need an environment width or a width ratio");
  }
  return 0;
}

void SamplePlan::validate() const {
  if (w_o < 3 || w_o > BitState::kMaxWidth) throw std::invalid_argument("organism width must be in 3..64");
  if (w_e && ratio) throw std::invalid_argument("give either an environment width or a ratio, not both");
  if (variant == Variant::CaseII && w_e && *w_e != kCaseTwoEnvWidth)
    throw std::invalid_argument("case2 requires an environment of width 8");
  if ((variant == Variant::CaseIII || variant == Variant::IsolatedECA) && ((w_e && *w_e != 0) || ratio))
    throw std::invalid_argument(std::string(to_string(variant)) + " has no environment");
  if (variant == Variant::CaseI) {
    const unsigned we = effective_w_e();
    if (we < 1 || we > BitState::kMaxWidth) throw std::invalid_argument("environment width must be in 1..64");
  }
  if (variant == Variant::CaseIII && !(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in [0, 1)");
  if (samples == 0) throw std::invalid_argument("a plan needs at least one sample");
  if (complexity && lyapunov_mode == LyapunovMode::SinglePosition && perturb_bit >= w_o)
    throw std::invalid_argument("perturbed cell lies outside the organism");
  if (complexity && w_o + effective_w_e() > BitState::kMaxWidth)
    throw std::invalid_argument("complexity needs a full-system width of at most 64");
}

std::uint64_t sample_space_size(Variant variant, unsigned w_o, unsigned w_e) {
  std::uint64_t n = saturating_mul(kCanonicalCount, saturating_pow2(w_o));
  if (has_environment(variant)) n = saturating_mul(saturating_mul(n, kCanonicalCount), saturating_pow2(w_e));
  return n;
}

std::vector<InitialTuple> draw_plan(const SamplePlan& plan) {
  plan.validate();
  const auto& reps = canonical_rules();
  const unsigned w_o = plan.w_o;
  const unsigned w_e = plan.effective_w_e();
  const bool env = has_environment(plan.variant);
  CounterRng rng(plan.master_seed, kDrawStream);
  std::vector<InitialTuple> out;
  out.reserve(plan.samples);

  if (!is_deterministic(plan.variant)) {
    for (std::uint64_t i = 0; i < plan.samples; ++i) {
      InitialTuple t;
      t.r_o = reps[rng.next_below(kCanonicalCount)];
      t.s_o = rng.next_u64() & BitState::mask_for(w_o);
      t.seed = CounterRng::derive_key(plan.master_seed, i);
      out.push_back(t);
    }
    return out;
  }

  const std::uint64_t space = sample_space_size(plan.variant, w_o, w_e);
  if (plan.samples > space)
    throw std::invalid_argument("sample count " + std::to_string(plan.samples) + " exceeds the " + std::to_string(space) +
                                " distinct initial tuples");

  if (plan.samples > space / 2) {
    // Dense: partial Fisher-Yates over the whole index space.
    std::vector<std::uint64_t> index(space);
    std::iota(index.begin(), index.end(), std::uint64_t{0});
    for (std::uint64_t i = 0; i < plan.samples; ++i) {
      std::swap(index[i], index[i + rng.next_below(space - i)]);
      out.push_back(decode_tuple(index[i], env, w_o, w_e));
    }
    return out;
  }

  std::unordered_set<InitialTuple, TupleHash> seen;
  seen.reserve(plan.samples * 2);
  while (out.size() < plan.samples) {
    InitialTuple t;
    t.r_o = reps[rng.next_below(kCanonicalCount)];
    t.s_o = rng.next_u64() & BitState::mask_for(w_o);
    if (env) {
      t.r_e = reps[rng.next_below(kCanonicalCount)];
      t.s_e = rng.next_u64() & BitState::mask_for(w_e);
    }
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

VariantConfig make_config(const SamplePlan& plan, const InitialTuple& tuple) {
  return config_for(plan.variant, plan.w_o, plan.effective_w_e(), plan.mu, tuple);
}

NormParams plan_norm_params(const SamplePlan& plan) {
  NormParams p = plan.norm;
  p.width = plan.w_o + plan.effective_w_e();
  return p;
}

ExecutionRecord evaluate(const SamplePlan& plan, const InitialTuple& tuple, std::optional<std::uint64_t> norm_bits) {
  const VariantConfig config = make_config(plan, tuple);
  const bool deterministic = is_deterministic(plan.variant);

  ExecutionRecord rec;
  rec.variant = plan.variant;
  rec.w_o = config.w_o();
  rec.w_e = config.w_e();
  rec.mu = plan.variant == Variant::CaseIII ? plan.mu : 0.0;
  rec.init = tuple;
  rec.t_P = poincare_time(rec.w_o);

  const Trajectory traj = run_trajectory(config, TrajectoryOptions{plan.step_cap, deterministic ? 0 : rec.t_P});
  const RecurrenceReport rep = measure_recurrence(config, traj);
  rec.t_r = rep.t_r;
  rec.t_r_rule = rep.t_r_rule;
  rec.t_a = rep.t_a;
  if (rep.censored) {
    rec.censored = true;
    return rec;
  }

  // Deterministic runs: the organism window closes on its own first repeat.
  // Stochastic runs: convergence plus one Poincare time of absorbed tail.
  const std::size_t window_end = deterministic ? rep.t_r : rep.t_r + rec.t_P;
  const auto window = traj.organism_states(0, window_end + 1);
  // Rule transitions are counted over [0, t_r), the span on which t_r is defined.
  const auto rules = traj.organism_rules(0, rep.t_r + 1);
  const InnReport inn = assess_innovation(window, rules, rec.w_o);

  rec.inn = inn.inn;
  rec.ue = ue_flag(rep);
  rec.oee = *rec.inn && *rec.ue;
  rec.attractor_ue = deterministic ? attractor_ue_flag(rep.cycle, rec.t_P) : std::nullopt;
  rec.n_rule_transitions = inn.n_rule_transitions;
  rec.innovation_I = inn.innovation_I;
  if (deterministic) rec.attractor_rules = cycle_rule_histogram(traj, rep.cycle);

  if (plan.complexity) {
    if (!norm_bits || *norm_bits == 0) throw std::invalid_argument("complexity needs a positive normalisation constant");
    // The organism's state trajectory up to its recurrence (or convergence).
    const auto states = traj.organism_states(0, rep.t_r + 1);
    rec.compressed_bits = trajectory_compressed_bits(states);
    rec.norm_bits = *norm_bits;
    rec.C = static_cast<double>(*rec.compressed_bits) / static_cast<double>(*norm_bits);

    const std::uint64_t horizon = std::max<std::uint64_t>(2, std::min(rec.t_r, rec.t_P));
    const LyapunovResult ly = plan.lyapunov_mode == LyapunovMode::AllPositions
                                  ? lyapunov_all_positions(config, horizon)
                                  : lyapunov(config, plan.perturb_bit, horizon);
    rec.k_extinct = ly.extinct;
    if (!ly.extinct) rec.k = ly.k;
  }
  return rec;
}

std::vector<ExecutionRecord> run_ensemble(const SamplePlan& plan, const std::vector<InitialTuple>& tuples, int threads,
                                          NormCache* cache) {
  plan.validate();
  std::optional<std::uint64_t> norm_bits;
  if (plan.complexity) {
    const NormParams params = plan_norm_params(plan);
    norm_bits = cache ? cache->get(params, threads) : normalization_constant(params, threads);
  }

  std::vector<ExecutionRecord> records(tuples.size());
  std::vector<std::exception_ptr> errors(tuples.size());
  const auto n = static_cast<std::int64_t>(tuples.size());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      records[i] = evaluate(plan, tuples[i], norm_bits);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

std::vector<ExecutionRecord> run_ensemble(const SamplePlan& plan, int threads, NormCache* cache) {
  return run_ensemble(plan, draw_plan(plan), threads, cache);
}

std::vector<ExecutionRecord> run_ensemble_serial(const SamplePlan& plan, NormCache* cache) {
  const auto tuples = draw_plan(plan);
  std::optional<std::uint64_t> norm_bits;
  if (plan.complexity) {
    const NormParams params = plan_norm_params(plan);
    norm_bits = cache ? cache->get(params, 1) : normalization_constant_serial(params);
  }
  std::vector<ExecutionRecord> records;
  records.reserve(tuples.size());
  for (const auto& t : tuples) records.push_back(evaluate(plan, t, norm_bits));
  return records;
}

void replay_attractor_rules(ExecutionRecord& record, std::uint64_t step_cap) {
  if (!is_deterministic(record.variant) || record.censored) return;
  const VariantConfig config = config_for(record.variant, record.w_o, record.w_e, record.mu, record.init);
  const Trajectory traj = run_trajectory(config, step_cap);
  const CycleInfo cycle = detect_cycle(traj);
  if (cycle.censored) return;
  record.attractor_rules = cycle_rule_histogram(traj, cycle);
}

}  // namespace oee
