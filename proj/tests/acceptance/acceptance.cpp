// Acceptance checks. Each criterion prints exactly one line of the form
//   CRITERION <n>: PASS|FAIL - <measured values>
// and the process exits non-zero if any selected criterion fails.
//
// Every tolerance, sample size and seed used here is pinned below.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "oee/ensemble.hpp"
#include "oee/innovation.hpp"
#include "oee/io.hpp"
#include "oee/recurrence.hpp"
#include "oee/report.hpp"
#include "oee/variants.hpp"
#include "oee/wolfram_class.hpp"

namespace {

using namespace oee;

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SamplePlan plan_for(Variant v, unsigned w_o, std::optional<unsigned> w_e, std::uint64_t samples, bool complexity = false) {
  SamplePlan p;
  p.variant = v;
  p.w_o = w_o;
  p.w_e = w_e;
  p.samples = samples;
  p.master_seed = kSeed;
  p.complexity = complexity;
  return p;
}

EnsembleReport report_of(const std::vector<ExecutionRecord>& records) {
  return aggregate(records, ClassTable::builtin());
}

// Three binomial standard deviations of a percentage estimated from n draws.
double three_sigma_pct(double pct, std::uint64_t n) {
  const double p = pct / 100.0;
  return 300.0 * std::sqrt(std::max(p * (1 - p), 0.25 / static_cast<double>(n)) / static_cast<double>(n));
}

// 1. Isolated ECA: exhaustive over canonical rules and initial states.
Outcome criterion1() {
  std::string detail;
  bool pass = true;
  for (unsigned w : {3u, 4u, 5u}) {
    SamplePlan plan = plan_for(Variant::IsolatedECA, w, std::nullopt, 88u << w);
    std::vector<InitialTuple> tuples;
    for (int r : canonical_rules())
      for (std::uint64_t s = 0; s < (1u << w); ++s) tuples.push_back(InitialTuple{s, static_cast<std::uint8_t>(r), 0, 0, 0});
    const auto records = run_ensemble(plan, tuples, 0, nullptr);
    std::uint64_t inn = 0, oee = 0, over = 0;
    for (const auto& r : records) {
      inn += r.inn.value_or(true);
      oee += r.oee.value_or(true);
      over += r.t_r > (std::uint64_t{1} << w);
    }
    pass = pass && inn == 0 && oee == 0 && over == 0;
    detail += fmt("w_o=%u: n=%zu INN=%llu OEE=%llu t_r>2^w=%llu; ", w, records.size(), (unsigned long long)inn,
                  (unsigned long long)oee, (unsigned long long)over);
  }
  return {pass, detail};
}

// 2. Poincare bound.
Outcome criterion2() {
  bool pass = true;
  std::string detail;
  for (unsigned w = 3; w <= 7; ++w) {
    pass = pass && poincare_time(w) == (std::uint64_t{1} << w);
    detail += fmt("t_P(%u)=%llu ", w, (unsigned long long)poincare_time(w));
  }
  return {pass, detail};
}

// 3. Worked example: an organism of width 4 and an environment of width 6
// whose frequency comparison moves rule 30 to rule 62. Searched exhaustively.
Outcome criterion3() {
  const RuleTable r30 = RuleTable::from_bits(30);
  std::uint64_t found = 0;
  std::string witness;
  for (std::uint64_t so = 0; so < 16; ++so)
    for (std::uint64_t se = 0; se < 64; ++se) {
      const BitState o(so, 4), e(se, 6);
      if (case1_rule_update(o, r30, e).number() == 62) {
        if (!found) witness = o.to_string() + "/" + e.to_string();
        ++found;
      }
    }
  // Any width pair: the flip mask {101} alone must be reachable at all.
  std::uint64_t any = 0;
  for (unsigned wo = 3; wo <= 8; ++wo)
    for (unsigned we = 3; we <= 10; ++we)
      for (std::uint64_t so = 0; so < (1u << wo); ++so)
        for (std::uint64_t se = 0; se < (1u << we); ++se)
          any += case1_rule_update(BitState(so, wo), r30, BitState(se, we)).number() == 62;
  return {found > 0, fmt("(w_o,w_e)=(4,6) state pairs giving 30->62: %llu%s; over all w_o 3..8, w_e 3..10: %llu",
                         (unsigned long long)found, found ? (" e.g. " + witness).c_str() : "", (unsigned long long)any)};
}

// 4. Case II headline rate at w_o = 3.
Outcome criterion4() {
  constexpr double kTarget = 42.47, kTol = 3.0;
  const auto rep = report_of(run_ensemble(plan_for(Variant::CaseII, 3, std::nullopt, 10'000)));
  return {std::abs(rep.oee_percent - kTarget) <= kTol,
          fmt("OEE%%=%.2f (target %.2f +/- %.1f, n=%llu)", rep.oee_percent, kTarget, kTol, (unsigned long long)rep.counted)};
}

// 5. Case II trend over w_o = 3..6.
Outcome criterion5() {
  std::vector<double> pct;
  std::string detail = "OEE% by w_o:";
  for (unsigned w = 3; w <= 6; ++w) {
    const auto rep = report_of(run_ensemble(plan_for(Variant::CaseII, w, std::nullopt, 10'000)));
    pct.push_back(rep.oee_percent);
    detail += fmt(" %u:%.2f", w, rep.oee_percent);
  }
  bool pass = true;
  for (std::size_t i = 1; i < pct.size(); ++i) pass = pass && pct[i] < pct[i - 1];
  return {pass, detail + " (strictly decreasing required)"};
}

// 6. Case I environment scaling.
Outcome criterion6() {
  bool pass = true;
  std::string detail;
  constexpr double kTol = 3.0;
  const std::pair<unsigned, double> anchors[] = {{3, 0.02}, {6, 10.81}};
  for (auto [we, target] : anchors) {
    const auto rep = report_of(run_ensemble(plan_for(Variant::CaseI, 3, we, 100'000)));
    const bool ok = std::abs(rep.oee_percent - target) <= kTol;
    pass = pass && ok;
    detail += fmt("w_o=3 w_e=%u OEE%%=%.2f (target %.2f +/- %.0f) %s; ", we, rep.oee_percent, target, kTol, ok ? "ok" : "off");
  }
  for (unsigned wo : {3u, 4u, 5u}) {
    detail += fmt("w_o=%u:", wo);
    double prev = -1;
    std::uint64_t prev_n = 1;
    for (const WidthRatio& ratio : kCaseOneRatios) {
      SamplePlan plan = plan_for(Variant::CaseI, wo, std::nullopt, 10'000);
      plan.ratio = ratio;
      const auto rep = report_of(run_ensemble(plan));
      if (prev >= 0) {
        // Allowed drop: three standard deviations of the difference of two proportions.
        const double slack = std::hypot(three_sigma_pct(prev, prev_n), three_sigma_pct(rep.oee_percent, rep.counted));
        if (rep.oee_percent < prev - slack) pass = false;
      }
      detail += fmt(" %u/%u:%.2f", ratio.num, ratio.den, rep.oee_percent);
      prev = rep.oee_percent;
      prev_n = rep.counted;
    }
    detail += "; ";
  }
  return {pass, detail};
}

// 7. INN rates.
Outcome criterion7() {
  bool pass = true;
  std::string detail;
  for (Variant v : {Variant::CaseII, Variant::CaseIII}) {
    for (unsigned w = 3; w <= 5; ++w) {
      const auto rep = report_of(run_ensemble(plan_for(v, w, std::nullopt, 10'000)));
      pass = pass && rep.inn_percent >= 99.0;
      detail += fmt("%s w_o=%u INN%%=%.2f; ", std::string(to_string(v)).c_str(), w, rep.inn_percent);
    }
  }
  constexpr double kTarget = 54.6, kTol = 3.0;
  const auto rep = report_of(run_ensemble(plan_for(Variant::CaseI, 3, 3u, 10'000)));
  pass = pass && std::abs(rep.inn_percent - kTarget) <= kTol;
  detail += fmt("case1 3,3 INN%%=%.2f (target %.1f +/- %.0f); case2/case3 need >= 99", rep.inn_percent, kTarget, kTol);
  return {pass, detail};
}

// 8. Case III convergence and exponential t_r distribution.
Outcome criterion8() {
  constexpr double kMinR2 = 0.9;
  // Log-count fit only over t_r values seen at least this often, so that
  // the logarithm of single-digit Poisson counts does not dominate the tail.
  constexpr std::uint64_t kMinCount = 10;
  bool all_converged = true;
  std::string detail;
  for (unsigned w = 3; w <= 5; ++w) {
    const auto records = run_ensemble(plan_for(Variant::CaseIII, w, std::nullopt, 10'000));
    std::uint64_t censored = 0;
    for (const auto& r : records) censored += r.censored;
    all_converged = all_converged && censored == 0;
    detail += fmt("w_o=%u censored=%llu; ", w, (unsigned long long)censored);
  }
  const auto rep = report_of(run_ensemble(plan_for(Variant::CaseIII, 4, std::nullopt, 10'000)));
  struct Fit {
    double points = 0, slope = 0, r2 = 0;
  };
  auto fit = [&](std::uint64_t min_count) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, n = 0;
    for (auto [t, c] : rep.t_r_counts) {
      if (c < min_count) continue;
      const double x = static_cast<double>(t), y = std::log(static_cast<double>(c));
      sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y; n += 1;
    }
    const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
    return n >= 3 ? Fit{n, cov / vx, cov * cov / (vx * vy)} : Fit{n, 0, 0};
  };
  const Fit f = fit(kMinCount);
  const Fit raw = fit(1);
  const bool pass = all_converged && f.r2 >= kMinR2 && raw.r2 >= kMinR2 && f.slope < 0;
  detail += fmt("w_o=4 log-count fit over %.0f t_r values with count >= %llu: slope=%.4f R^2=%.4f (need >= %.2f, "
                "negative slope); unfiltered: %.0f values, R^2=%.4f (also >= %.2f)",
                f.points, (unsigned long long)kMinCount, f.slope, f.r2, kMinR2, raw.points, raw.r2, kMinR2);
  return {pass, detail};
}

// 9. Innovation metric tracks recurrence time.
Outcome criterion9() {
  const auto rep = report_of(run_ensemble(plan_for(Variant::CaseI, 4, 4u, 10'000)));
  const auto& s = rep.innovation_spearman;
  return {s.n >= 10'000 && s.rho > 0 && s.p_value < 1e-3,
          fmt("n=%llu rho=%.4f p=%.3g (need rho>0, p<1e-3)", (unsigned long long)s.n, s.rho, s.p_value)};
}

// 10. Metagenome class skew.
Outcome criterion10() {
  const auto rep = report_of(run_ensemble(plan_for(Variant::CaseI, 4, 4u, 10'000)));
  const auto& m = rep.metagenome_all;
  const double low = m.class_fraction(WolframClass::I) + m.class_fraction(WolframClass::II);
  const double high = m.class_fraction(WolframClass::III) + m.class_fraction(WolframClass::IV);
  return {low > high, fmt("class I+II=%.4f class III+IV=%.4f over %llu attractor steps", low, high,
                          (unsigned long long)m.total)};
}

// 11. Complexity directions.
Outcome criterion11() {
  SamplePlan plan = plan_for(Variant::CaseI, 4, 4u, 10'000, true);
  plan.norm.samples = 1'000;  // the constant only rescales C; both means share it
  const auto rep = report_of(run_ensemble(plan));
  const auto& all = rep.complexity_all;
  const auto& oee = rep.complexity_oee;
  if (!all.mean_C || !oee.mean_C || !all.mean_k || !oee.mean_k)
    return {false, fmt("missing means (OEE records: %llu)", (unsigned long long)rep.oee)};
  const bool pass = *oee.mean_C < *all.mean_C && *oee.mean_k > *all.mean_k;
  return {pass, fmt("mean C: OEE=%.4g all=%.4g (need OEE < all); mean k: OEE=%.4f all=%.4f (need OEE > all; OEE n=%llu)", *oee.mean_C, *all.mean_C,
                    *oee.mean_k, *all.mean_k, (unsigned long long)rep.oee)};
}

// 12. Constraint method against brute-force containment.
Outcome criterion12() {
  std::string detail;
  bool pass = true;
  for (unsigned w : {3u, 4u}) {
    const auto oracle = CounterfactualOracle::build(w);
    SamplePlan plan = plan_for(Variant::CaseI, w, w, 10'000);
    std::vector<InitialTuple> tuples;
    if (w == 3) {
      for (int ro : canonical_rules())
        for (int re : canonical_rules())
          for (std::uint64_t so = 0; so < 8; ++so)
            for (std::uint64_t se = 0; se < 8; ++se)
              tuples.push_back(InitialTuple{so, static_cast<std::uint8_t>(ro), se, static_cast<std::uint8_t>(re), 0});
    } else {
      tuples = draw_plan(plan);
    }
    std::atomic<std::uint64_t> mismatches{0}, innovative{0};
    const auto n = static_cast<std::int64_t>(tuples.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      const VariantConfig config = make_config(plan, tuples[i]);
      const Trajectory traj = run_trajectory(config, 0);
      const RecurrenceReport rep = measure_recurrence(config, traj);
      const auto window = traj.organism_states(0, rep.t_r + 1);
      const bool reproducible = is_eca_reproducible(window).has_value();
      if (reproducible != oracle.contains(window)) ++mismatches;
      if (!reproducible) ++innovative;
    }
    pass = pass && mismatches == 0;
    detail += fmt("w_o=%u windows=%zu innovative=%llu mismatches=%llu; ", w, tuples.size(),
                  (unsigned long long)innovative.load(), (unsigned long long)mismatches.load());
  }
  return {pass, detail};
}

// 13. Byte-identical CSV across worker counts.
Outcome criterion13() {
  bool pass = true;
  std::string detail;
  for (Variant v : {Variant::CaseI, Variant::CaseII}) {
    SamplePlan plan = plan_for(v, 4, v == Variant::CaseI ? std::optional<unsigned>(4) : std::nullopt, 2'000, true);
    plan.norm.samples = 200;
    const std::string a = records_csv_string(run_ensemble(plan, 1));
    const std::string b = records_csv_string(run_ensemble(plan, 4));
    const std::string c = records_csv_string(run_ensemble_serial(plan));
    const bool same = a == b && a == c;
    pass = pass && same;
    detail += fmt("%s: %zu bytes, 1 vs 4 workers vs serial %s; ", std::string(to_string(v)).c_str(), a.size(),
                  same ? "identical" : "DIFFER");
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion,-c", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 13));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty())
    for (int i = 1; i <= 13; ++i) selected.push_back(i);

  const std::map<int, std::function<Outcome()>> checks = {
      {1, criterion1},  {2, criterion2},   {3, criterion3},   {4, criterion4},   {5, criterion5},
      {6, criterion6},  {7, criterion7},   {8, criterion8},   {9, criterion9},   {10, criterion10},
      {11, criterion11}, {12, criterion12}, {13, criterion13}};

  int failures = 0;
  for (int c : selected) {
    const double start = omp_get_wtime();
    Outcome o;
    try {
      o = checks.at(c)();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("CRITERION %d: %s - %s [%.1fs]\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str(), omp_get_wtime() - start);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
