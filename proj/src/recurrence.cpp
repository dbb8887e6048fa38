#include "oee/recurrence.hpp"

#include <stdexcept>

#include "oee/snapshot_index.hpp"

namespace oee {

std::uint64_t poincare_time(unsigned w_o) {
  if (w_o < 3) throw std::invalid_argument("organism width must be at least 3");
  if (w_o >= 64) throw std::overflow_error("2^w_o does not fit in 64 bits");
  return std::uint64_t{1} << w_o;
}

CycleInfo detect_cycle(const Trajectory& trajectory) {
  thread_local SnapshotIndex index;
  index.clear();
  const auto& snaps = trajectory.snapshots;
  for (std::size_t t = 0; t < snaps.size(); ++t) {
    if (auto first = index.find_or_insert(snaps[t], t)) return CycleInfo{*first, t - *first, false};
  }
  if (trajectory.cap_hit) return CycleInfo{snaps.empty() ? 0 : snaps.size() - 1, 0, true};
  throw std::invalid_argument("trajectory ends before its first repeated snapshot");
}

ProjectedRecurrence projected_recurrence(std::span<const std::uint64_t> sequence, const CycleInfo& cycle) {
  if (cycle.censored || cycle.period == 0) throw std::invalid_argument("projected recurrence needs a complete cycle");
  const std::uint64_t P = cycle.pre_period;
  const std::uint64_t L = cycle.period;
  if (sequence.size() < P + L) throw std::invalid_argument("sequence shorter than pre-period plus period");

  // Periodic extension beyond the recorded cycle.
  auto at = [&](std::uint64_t t) { return t < P + L ? sequence[t] : sequence[P + (t - P) % L]; };

  std::uint64_t lambda = L;
  for (std::uint64_t d = 1; d <= L; ++d) {
    if (L % d != 0) continue;
    bool periodic = true;
    for (std::uint64_t t = P; t < P + L && periodic; ++t) periodic = at(t + d) == at(t);
    if (periodic) {
      lambda = d;
      break;
    }
  }
  std::uint64_t p = P;
  while (p > 0 && at(p - 1) == at(p - 1 + lambda)) --p;
  return ProjectedRecurrence{p, lambda, p + lambda};
}

ConvergenceTime case3_convergence_time(const Trajectory& trajectory) {
  for (std::size_t t = 0; t < trajectory.snapshots.size(); ++t) {
    if (trajectory.snapshots[t].s_o.homogeneous()) return ConvergenceTime{t, false};
  }
  return ConvergenceTime{trajectory.snapshots.empty() ? 0 : trajectory.snapshots.size() - 1, true};
}

std::optional<bool> ue_flag(const RecurrenceReport& report) {
  if (report.censored) return std::nullopt;
  return report.t_r > report.t_P || report.t_r_rule > report.t_P;
}

std::optional<bool> attractor_ue_flag(const CycleInfo& cycle, std::uint64_t t_P) {
  if (cycle.censored) return std::nullopt;
  return cycle.period > t_P;
}

RecurrenceReport measure_recurrence(const VariantConfig& config, const Trajectory& trajectory) {
  RecurrenceReport r;
  r.t_P = poincare_time(config.w_o());
  if (!is_deterministic(config.variant)) {
    const ConvergenceTime conv = case3_convergence_time(trajectory);
    r.t_r = conv.t;
    r.censored = conv.censored;
    return r;
  }
  r.cycle = detect_cycle(trajectory);
  if (r.cycle.censored) {
    r.censored = true;
    r.t_r = r.cycle.pre_period;
    return r;
  }
  const std::size_t n = r.cycle.pre_period + r.cycle.period;
  std::vector<std::uint64_t> states(n), rules(n);
  for (std::size_t t = 0; t < n; ++t) {
    states[t] = trajectory.snapshots[t].s_o.value();
    rules[t] = trajectory.snapshots[t].r_o.number();
  }
  r.state = projected_recurrence(states, r.cycle);
  r.rule = projected_recurrence(rules, r.cycle);
  r.t_r = r.state.recurrence;
  r.t_r_rule = r.rule.recurrence;
  r.t_a = r.cycle.period;
  return r;
}

}  // namespace oee
