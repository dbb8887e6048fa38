#include "oee/variants.hpp"

#include <limits>
#include <string>

#include "oee/snapshot_index.hpp"

namespace oee {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::CaseI: return "case1";
    case Variant::CaseII: return "case2";
    case Variant::CaseIII: return "case3";
    case Variant::IsolatedECA: return "eca";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "case1") return Variant::CaseI;
  if (name == "case2") return Variant::CaseII;
  if (name == "case3") return Variant::CaseIII;
  if (name == "eca") return Variant::IsolatedECA;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "' (expected case1, case2, case3 or eca)");
}

void VariantConfig::validate() const {
  if (w_o() < 3) throw std::invalid_argument("organism width must be at least 3");
  switch (variant) {
    case Variant::CaseI:
      if (!s_e || !r_e) throw std::invalid_argument("case1 needs an environment state and rule");
      break;
    case Variant::CaseII:
      if (!s_e || !r_e) throw std::invalid_argument("case2 needs an environment state and rule");
      if (s_e->width() != kCaseTwoEnvWidth) throw std::invalid_argument("case2 requires an environment of width 8");
      break;
    case Variant::CaseIII:
      if (s_e || r_e) throw std::invalid_argument("case3 has no environment subsystem");
      if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in [0, 1)");
      break;
    case Variant::IsolatedECA:
      if (s_e || r_e) throw std::invalid_argument("an isolated ECA has no environment subsystem");
      break;
  }
}

VariantConfig VariantConfig::isolated(BitState s_o, RuleTable r_o) {
  VariantConfig c;
  c.variant = Variant::IsolatedECA;
  c.s_o = s_o;
  c.r_o = r_o;
  c.validate();
  return c;
}

VariantConfig VariantConfig::case1(BitState s_o, RuleTable r_o, BitState s_e, RuleTable r_e) {
  VariantConfig c;
  c.variant = Variant::CaseI;
  c.s_o = s_o;
  c.r_o = r_o;
  c.s_e = s_e;
  c.r_e = r_e;
  c.validate();
  return c;
}

VariantConfig VariantConfig::case2(BitState s_o, RuleTable r_o, BitState s_e, RuleTable r_e) {
  VariantConfig c = case1(s_o, r_o, s_e, r_e);
  c.variant = Variant::CaseII;
  c.validate();
  return c;
}

VariantConfig VariantConfig::case3(BitState s_o, RuleTable r_o, double mu, std::uint64_t seed) {
  VariantConfig c;
  c.variant = Variant::CaseIII;
  c.s_o = s_o;
  c.r_o = r_o;
  c.mu = mu;
  c.seed = seed;
  c.validate();
  return c;
}

std::vector<BitState> Trajectory::organism_states(std::size_t first, std::size_t last) const {
  std::vector<BitState> out;
  out.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) out.push_back(snapshots.at(i).s_o);
  return out;
}

std::vector<RuleTable> Trajectory::organism_rules(std::size_t first, std::size_t last) const {
  std::vector<RuleTable> out;
  out.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) out.push_back(snapshots.at(i).r_o);
  return out;
}

RuleTable case1_rule_update(const TripletCounts& organism, unsigned w_o, const TripletCounts& environment, unsigned w_e,
                            RuleTable r_o) {
  std::uint8_t flips = 0;
  for (unsigned t = 0; t < 8; ++t) {
    const std::uint64_t lhs = std::uint64_t{organism[t]} * w_e;
    const std::uint64_t rhs = std::uint64_t{environment[t]} * w_o;
    if (organism[t] > 0 && lhs >= rhs) flips |= static_cast<std::uint8_t>(1u << t);
  }
  return r_o.flipped(flips);
}

RuleTable case1_rule_update(const BitState& s_o, RuleTable r_o, const BitState& s_e) {
  return case1_rule_update(triplet_counts(s_o), s_o.width(), triplet_counts(s_e), s_e.width(), r_o);
}

RuleTable case2_rule_update(const BitState& s_e) {
  if (s_e.width() != kCaseTwoEnvWidth) throw std::invalid_argument("case2 rule update needs an 8-cell environment");
  return RuleTable::from_bits(static_cast<std::uint8_t>(s_e.value()));
}

RuleTable case3_rule_update(RuleTable r_o, double mu, CounterRng& rng) {
  std::uint8_t flips = 0;
  for (unsigned triplet : kTripletOrder) {
    if (rng.next_double() < mu) flips |= static_cast<std::uint8_t>(1u << triplet);
  }
  return r_o.flipped(flips);
}

SystemSnapshot initial_snapshot(const VariantConfig& config) {
  return SystemSnapshot{0, config.s_o, config.r_o, config.s_e, config.r_e};
}

SystemSnapshot system_step(const VariantConfig& config, const SystemSnapshot& snap, CounterRng& rng) {
  SystemSnapshot next;
  next.t = snap.t + 1;
  next.r_e = snap.r_e;
  switch (config.variant) {
    case Variant::CaseI: next.r_o = case1_rule_update(snap.s_o, snap.r_o, *snap.s_e); break;
    case Variant::CaseII: next.r_o = case2_rule_update(*snap.s_e); break;
    case Variant::CaseIII: next.r_o = case3_rule_update(snap.r_o, config.mu, rng); break;
    case Variant::IsolatedECA: next.r_o = snap.r_o; break;
  }
  next.s_o = step(next.r_o, snap.s_o);
  if (snap.s_e) next.s_e = step(*snap.r_e, *snap.s_e);
  return next;
}

std::uint64_t default_step_cap(const VariantConfig& config) {
  if (!is_deterministic(config.variant)) return 1'000'000;
  const unsigned bits = config.w_o() + config.w_e();
  if (bits + 8 >= 64) return std::numeric_limits<std::uint64_t>::max();
  return (std::uint64_t{256} << bits) + 1;
}

Trajectory run_trajectory(const VariantConfig& config, std::uint64_t cap) {
  return run_trajectory(config, TrajectoryOptions{cap, 0});
}

Trajectory run_trajectory(const VariantConfig& config, const TrajectoryOptions& options) {
  config.validate();
  const std::uint64_t cap = options.cap == 0 ? default_step_cap(config) : options.cap;
  thread_local SnapshotIndex index;
  index.clear();

  CounterRng rng(config.seed);
  Trajectory traj;
  traj.snapshots.push_back(initial_snapshot(config));
  const bool deterministic = is_deterministic(config.variant);

  auto stopped = [&](const SystemSnapshot& snap) {
    if (deterministic) return index.find_or_insert(snap, snap.t).has_value();
    return snap.s_o.homogeneous();
  };

  bool done = stopped(traj.snapshots.back());
  while (!done) {
    if (traj.snapshots.back().t >= cap) {
      traj.cap_hit = true;
      break;
    }
    traj.snapshots.push_back(system_step(config, traj.snapshots.back(), rng));
    done = stopped(traj.snapshots.back());
  }
  traj.stop_index = traj.snapshots.size() - 1;
  if (!traj.cap_hit) {
    for (std::uint64_t i = 0; i < options.tail; ++i) traj.snapshots.push_back(system_step(config, traj.snapshots.back(), rng));
  }
  return traj;
}

WideRun run_wide(const WideConfig& config, std::size_t rows) {
  if (config.s_o.size() < 3) throw std::invalid_argument("organism width must be at least 3");
  const bool with_env = has_environment(config.variant);
  if (with_env && config.s_e.empty()) throw std::invalid_argument("variant needs an environment state");
  if (config.variant == Variant::CaseII && config.s_e.size() != kCaseTwoEnvWidth)
    throw std::invalid_argument("case2 requires an environment of width 8");

  WideRun run;
  CounterRng rng(config.seed);
  WideState s_o = config.s_o;
  WideState s_e = config.s_e;
  RuleTable r_o = config.r_o;
  for (std::size_t t = 0; t < rows; ++t) {
    run.organism.push_back(s_o);
    run.rules.push_back(r_o);
    if (with_env) run.environment.push_back(s_e);
    if (t + 1 == rows) break;
    switch (config.variant) {
      case Variant::CaseI:
        r_o = case1_rule_update(triplet_counts(s_o), static_cast<unsigned>(s_o.size()), triplet_counts(s_e),
                                static_cast<unsigned>(s_e.size()), r_o);
        break;
      case Variant::CaseII: r_o = case2_rule_update(to_packed(s_e)); break;
      case Variant::CaseIII: r_o = case3_rule_update(r_o, config.mu, rng); break;
      case Variant::IsolatedECA: break;
    }
    s_o = step_reference(r_o, s_o);
    if (with_env) s_e = step_reference(config.r_e, s_e);
  }
  return run;
}

}  // namespace oee
