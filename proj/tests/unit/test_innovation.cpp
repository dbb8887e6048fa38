#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oee/ensemble.hpp"
#include "oee/innovation.hpp"
#include "oee/recurrence.hpp"

using namespace oee;

namespace {

std::vector<BitState> fixed_rule_run(RuleTable r, BitState s, std::size_t n) {
  std::vector<BitState> out{s};
  while (out.size() < n) out.push_back(s = step(r, s));
  return out;
}

std::vector<BitState> random_window(CounterRng& rng, unsigned w, std::size_t n) {
  std::vector<BitState> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(rng.next_below(1u << w), w);
  return out;
}

}  // namespace

TEST_CASE("fixed-rule trajectories are reproducible") {
  for (int r = 0; r < 256; ++r) {
    const auto states = fixed_rule_run(rule_from_number(r), BitState::from_string("0010110"), 12);
    const auto witness = is_eca_reproducible(states);
    REQUIRE(witness.has_value());
    CHECK(witness->number() <= r);
    CHECK(fixed_rule_run(*witness, states.front(), states.size()) == states);
    CHECK_FALSE(inn_flag(states));
  }
}

TEST_CASE("constraint examples") {
  const std::vector<BitState> split = {BitState::from_string("000"), BitState::from_string("010")};
  CHECK_FALSE(is_eca_reproducible(split).has_value());
  CHECK(inn_flag(split));

  std::vector<BitState> alternating;
  for (int i = 0; i < 6; ++i) alternating.push_back(i % 2 ? BitState::ones(5) : BitState::zeros(5));
  const auto w = is_eca_reproducible(alternating);
  REQUIRE(w.has_value());
  CHECK(w->output(0));
  CHECK_FALSE(w->output(7));

  const std::vector<BitState> constant(4, BitState::from_string("0110"));
  CHECK(is_eca_reproducible(constant).has_value());

  CHECK_THROWS_AS(is_eca_reproducible(std::vector<BitState>{BitState::zeros(3)}), std::invalid_argument);
  CHECK_THROWS_AS(is_eca_reproducible(std::vector<BitState>{BitState::zeros(3), BitState::zeros(4)}), std::invalid_argument);
}

TEST_CASE("reproducibility is inherited by sub-windows") {
  CounterRng rng(51);
  for (int i = 0; i < 300; ++i) {
    const auto states = fixed_rule_run(RuleTable::from_bits(rng.next_below(256)), BitState(rng.next_below(32), 5), 10);
    const std::size_t a = rng.next_below(8);
    const std::size_t b = a + 2 + rng.next_below(states.size() - a - 1);
    CHECK(is_eca_reproducible(std::span(states).subspan(a, b - a)).has_value());
  }
}

TEST_CASE("brute-force oracle agrees with the constraint method") {
  for (unsigned w = 3; w <= 5; ++w) {
    const auto oracle = CounterfactualOracle::build(w);
    CHECK(oracle.records().size() == (256u << w));
    // Every enumerated trajectory is contained in the set.
    for (const auto& rec : oracle.records()) {
      std::vector<BitState> states;
      for (auto v : rec.states) states.emplace_back(v, w);
      REQUIRE(oracle.contains(states));
    }
    CounterRng rng(60 + w);
    for (int i = 0; i < 3000; ++i) {
      std::vector<BitState> window;
      switch (i % 3) {
        case 0: window = random_window(rng, w, 2 + rng.next_below(3)); break;
        case 1: window = fixed_rule_run(RuleTable::from_bits(rng.next_below(256)), BitState(rng.next_below(1u << w), w),
                                        2 + rng.next_below(3 * (1u << w))); break;
        default: {
          // A fixed-rule run with one corrupted state.
          window = fixed_rule_run(RuleTable::from_bits(rng.next_below(256)), BitState(rng.next_below(1u << w), w), 6);
          window[rng.next_below(6)] = BitState(rng.next_below(1u << w), w);
        }
      }
      REQUIRE(oracle.contains(window) == is_eca_reproducible(window).has_value());
    }
  }
  CHECK_THROWS_AS(CounterfactualOracle::build(6), std::invalid_argument);
}

TEST_CASE("oracle agrees on Case II windows") {
  const auto oracle = CounterfactualOracle::build(4);
  SamplePlan plan;
  plan.variant = Variant::CaseII;
  plan.w_o = 4;
  plan.samples = 2000;
  plan.complexity = false;
  std::size_t reproducible = 0;
  for (const auto& t : draw_plan(plan)) {
    const auto cfg = make_config(plan, t);
    const auto traj = run_trajectory(cfg, 0);
    const auto rep = measure_recurrence(cfg, traj);
    const auto window = traj.organism_states(0, rep.t_r + 1);
    const bool r = is_eca_reproducible(window).has_value();
    reproducible += r;
    REQUIRE(oracle.contains(window) == r);
  }
  CHECK(reproducible > 0);  // both verdicts are exercised
}

TEST_CASE("oracle cache round-trip and corruption") {
  const auto dir = std::filesystem::temp_directory_path() / "oee_oracle_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "w3.bin";
  const auto built = CounterfactualOracle::build(3);
  built.save(file);
  {
    std::ifstream in(file, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "OEEC");
  }
  CHECK(CounterfactualOracle::load(file) == built);
  CHECK(CounterfactualOracle::load_or_build(file, 3) == built);
  std::filesystem::resize_file(file, 20);
  CHECK_THROWS_AS(CounterfactualOracle::load(file), DataError);
  CHECK(CounterfactualOracle::load_or_build(file, 3) == built);  // rebuilt and rewritten
  CHECK(CounterfactualOracle::load(file) == built);
  std::filesystem::remove_all(dir);
}

TEST_CASE("innovation metric") {
  const std::vector<RuleTable> constant(10, rule_from_number(30));
  CHECK(innovation_metric(constant, 4) == 0.0);
  std::vector<RuleTable> changing;
  for (int i = 0; i <= 16; ++i) changing.push_back(rule_from_number(i % 2 ? 30 : 62));
  CHECK(count_rule_transitions(changing) == 16);
  CHECK(innovation_metric(changing, 4) == 1.0);

  const std::vector<BitState> states = {BitState::from_string("000"), BitState::from_string("010")};
  const auto rep = assess_innovation(states, changing, 4);
  CHECK(rep.inn);
  CHECK_FALSE(rep.witness_rule.has_value());
  const auto calm = assess_innovation(std::vector<BitState>(3, BitState::zeros(4)), constant, 4);
  CHECK_FALSE(calm.inn);
  CHECK(calm.witness_rule.has_value());
}
