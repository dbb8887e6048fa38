#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "oee/variants.hpp"

namespace oee {

/// 2^w_o for 3 <= w_o <= 63; throws std::overflow_error for w_o = 64.
std::uint64_t poincare_time(unsigned w_o);

/// Full-system cycle: snapshot(t + period) == snapshot(t) for all t >= pre_period.
struct CycleInfo {
  std::uint64_t pre_period = 0;
  std::uint64_t period = 0;
  bool censored = false;
};

/// First repeated snapshot of a deterministic trajectory, found through a
/// first-visit map. A trajectory that ended on its cap yields a censored result.
CycleInfo detect_cycle(const Trajectory& trajectory);

struct ProjectedRecurrence {
  std::uint64_t pre_period = 0;
  std::uint64_t period = 0;
  std::uint64_t recurrence = 0;  ///< pre_period + period
};

/// Recurrence of one projection (organism states or rules) of a trajectory
/// whose full-system cycle is known. `sequence` needs at least
/// cycle.pre_period + cycle.period entries; later entries are ignored.
ProjectedRecurrence projected_recurrence(std::span<const std::uint64_t> sequence, const CycleInfo& cycle);

struct ConvergenceTime {
  std::uint64_t t = 0;
  bool censored = false;
};

/// First time the organism is all-0 or all-1.
ConvergenceTime case3_convergence_time(const Trajectory& trajectory);

struct RecurrenceReport {
  std::uint64_t t_P = 0;
  std::uint64_t t_r = 0;
  std::uint64_t t_r_rule = 0;  ///< 0 when not measured (stochastic variant)
  std::uint64_t t_a = 0;       ///< full-system period; 0 for the stochastic variant
  CycleInfo cycle;
  ProjectedRecurrence state;
  ProjectedRecurrence rule;
  bool censored = false;
};

/// t_r > t_P or t_r' > t_P; empty when the report is censored.
std::optional<bool> ue_flag(const RecurrenceReport& report);
/// t_a > t_P; empty when the cycle is censored.
std::optional<bool> attractor_ue_flag(const CycleInfo& cycle, std::uint64_t t_P);

RecurrenceReport measure_recurrence(const VariantConfig& config, const Trajectory& trajectory);

}  // namespace oee
