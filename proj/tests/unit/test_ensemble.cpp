#include <doctest.h>

#include <set>
#include <tuple>

#include "oee/ensemble.hpp"
#include "oee/recurrence.hpp"

using namespace oee;

namespace {

SamplePlan small_plan(Variant v, unsigned w_o, std::optional<unsigned> w_e, std::uint64_t samples) {
  SamplePlan p;
  p.variant = v;
  p.w_o = w_o;
  p.w_e = w_e;
  p.samples = samples;
  p.master_seed = 17;
  p.norm.samples = 32;
  p.norm.steps = 512;
  return p;
}

}  // namespace

TEST_CASE("width ratios round down") {
  CHECK(WidthRatio{5, 2}.apply(3) == 7);
  CHECK(WidthRatio{1, 2}.apply(3) == 1);
  CHECK(WidthRatio{3, 2}.apply(5) == 7);
  SamplePlan p = small_plan(Variant::CaseI, 4, std::nullopt, 10);
  p.ratio = WidthRatio{2, 1};
  CHECK(p.effective_w_e() == 8);
  CHECK(small_plan(Variant::CaseII, 4, std::nullopt, 1).effective_w_e() == 8);
  CHECK(small_plan(Variant::CaseIII, 4, std::nullopt, 1).effective_w_e() == 0);
}

TEST_CASE("sample space size") {
  CHECK(sample_space_size(Variant::CaseI, 3, 3) == 88ull * 88 * 8 * 8);
  CHECK(sample_space_size(Variant::CaseII, 3, 8) == 88ull * 88 * 8 * 256);
  CHECK(sample_space_size(Variant::IsolatedECA, 5, 0) == 88ull * 32);
  CHECK(sample_space_size(Variant::CaseI, 40, 40) == ~std::uint64_t{0});
}

TEST_CASE("plan validation") {
  CHECK_THROWS_AS(small_plan(Variant::CaseI, 2, 3u, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small_plan(Variant::CaseI, 3, std::nullopt, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small_plan(Variant::CaseII, 3, 6u, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small_plan(Variant::CaseIII, 3, 3u, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small_plan(Variant::CaseI, 3, 3u, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(draw_plan(small_plan(Variant::IsolatedECA, 3, std::nullopt, 88 * 8 + 1)), std::invalid_argument);
  auto p = small_plan(Variant::CaseI, 3, 3u, 1);
  p.perturb_bit = 3;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("draws are distinct, canonical, reproducible and seed-dependent") {
  const std::set<int> reps(canonical_rules().begin(), canonical_rules().end());
  for (std::uint64_t n : {100ull, 400'000ull}) {  // sparse and dense (more than half the space) regimes
    const auto plan = small_plan(Variant::CaseI, 3, 3u, n);
    const auto a = draw_plan(plan);
    CHECK(a == draw_plan(plan));
    std::set<std::tuple<std::uint64_t, int, std::uint64_t, int>> seen;
    for (const auto& t : a) {
      CHECK(reps.count(t.r_o));
      CHECK(reps.count(t.r_e));
      CHECK(t.s_o < 8);
      CHECK(t.s_e < 8);
      seen.emplace(t.s_o, t.r_o, t.s_e, t.r_e);
    }
    CHECK(seen.size() == n);
    auto other = plan;
    other.master_seed = 18;
    CHECK(draw_plan(other) != a);
  }
  // Exhausting the space yields every tuple exactly once.
  const auto all = draw_plan(small_plan(Variant::IsolatedECA, 3, std::nullopt, 88 * 8));
  CHECK(std::set<std::pair<std::uint64_t, int>>([&] {
          std::set<std::pair<std::uint64_t, int>> s;
          for (const auto& t : all) s.emplace(t.s_o, t.r_o);
          return s;
        }()).size() == 88 * 8);
}

TEST_CASE("stochastic draws carry per-execution seeds") {
  const auto plan = small_plan(Variant::CaseIII, 4, std::nullopt, 50);
  const auto d = draw_plan(plan);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d[i].seed == CounterRng::derive_key(17, i));
    seeds.insert(d[i].seed);
  }
  CHECK(seeds.size() == 50);
}

TEST_CASE("evaluated records are internally consistent") {
  for (Variant v : {Variant::CaseI, Variant::CaseII, Variant::CaseIII, Variant::IsolatedECA}) {
    const auto plan = small_plan(v, 4, v == Variant::CaseI ? std::optional<unsigned>(4) : std::nullopt, 200);
    for (const auto& r : run_ensemble(plan, 2)) {
      CHECK(r.t_P == 16);
      REQUIRE_FALSE(r.censored);
      CHECK(r.oee == (*r.inn && *r.ue));
      CHECK(r.ue == (r.t_r > r.t_P || r.t_r_rule > r.t_P));
      CHECK(r.innovation_I == doctest::Approx(static_cast<double>(r.n_rule_transitions) / 16));
      CHECK(r.n_rule_transitions <= r.t_r);
      REQUIRE(r.C.has_value());
      CHECK(*r.C > 0);
      CHECK(r.k_extinct != r.k.has_value());
      if (v == Variant::IsolatedECA) {
        CHECK_FALSE(*r.inn);
        CHECK(r.n_rule_transitions == 0);
      }
      if (is_deterministic(v)) {
        std::uint64_t steps = 0;
        for (auto [rule, c] : r.attractor_rules) steps += c;
        CHECK(steps == r.t_a);
        ExecutionRecord replay = r;
        replay.attractor_rules.clear();
        replay_attractor_rules(replay);
        CHECK(replay.attractor_rules == r.attractor_rules);
      } else {
        CHECK(r.t_a == 0);
        CHECK(r.attractor_rules.empty());
      }
    }
  }
}

TEST_CASE("censored executions are flagged, not scored") {
  auto plan = small_plan(Variant::CaseIII, 4, std::nullopt, 1);
  plan.mu = 0.0;
  plan.step_cap = 10;
  plan.complexity = false;
  const InitialTuple t{0b0110, 204, 0, 0, 1};
  const auto r = evaluate(plan, t, std::nullopt);
  CHECK(r.censored);
  CHECK_FALSE(r.ue.has_value());
  CHECK_FALSE(r.inn.has_value());
}

TEST_CASE("ensemble output does not depend on the worker count") {
  const auto plan = small_plan(Variant::CaseI, 4, 4u, 300);
  const auto serial = run_ensemble_serial(plan);
  CHECK(run_ensemble(plan, 1) == serial);
  CHECK(run_ensemble(plan, 3) == serial);
  auto c3 = small_plan(Variant::CaseIII, 4, std::nullopt, 200);
  CHECK(run_ensemble(c3, 4) == run_ensemble_serial(c3));
}

TEST_CASE("normalisation cache is used by the driver") {
  const auto plan = small_plan(Variant::CaseII, 3, std::nullopt, 20);
  NormCache cache;
  cache.put(plan_norm_params(plan), 123456);
  for (const auto& r : run_ensemble(plan, 1, &cache)) CHECK(r.norm_bits == 123456u);
  CHECK(plan_norm_params(plan).width == 11);
}
