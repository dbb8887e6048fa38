#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "oee/eca.hpp"
#include "oee/rng.hpp"
#include "oee/wolfram_class.hpp"

using namespace oee;

TEST_CASE("rule tables follow Wolfram numbering in triplet order") {
  using Out = std::array<std::uint8_t, 8>;
  CHECK(rule_from_number(30).outputs() == Out{0, 0, 0, 1, 1, 1, 1, 0});
  CHECK(rule_from_number(0).outputs() == Out{0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(rule_from_number(62).outputs() == Out{0, 0, 1, 1, 1, 1, 1, 0});
  for (int n = 0; n < 256; ++n) CHECK(rule_to_number(rule_from_number(n)) == n);
  CHECK_THROWS_AS(rule_from_number(256), std::invalid_argument);
  CHECK_THROWS_AS(rule_from_number(-1), std::invalid_argument);
}

TEST_CASE("stepping matches hand-applied rules") {
  CHECK(step(rule_from_number(30), BitState::from_string("00100")).to_string() == "01110");
  CHECK(step(rule_from_number(0), BitState::from_string("1011")).value() == 0);
  for (std::uint64_t s = 0; s < 64; ++s) CHECK(step(rule_from_number(204), BitState(s, 6)).value() == s);
  CHECK_THROWS_AS(BitState(8, 3), std::invalid_argument);
}

TEST_CASE("packed step agrees with the per-cell reference") {
  CounterRng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const unsigned w = 3 + static_cast<unsigned>(rng.next_below(62));
    const BitState s(rng.next_u64() & BitState::mask_for(w), w);
    const RuleTable r = RuleTable::from_bits(static_cast<std::uint8_t>(rng.next_below(256)));
    CHECK(to_wide(step(r, s)) == step_reference(r, to_wide(s)));
  }
}

TEST_CASE("step symmetries: shift, complement and mirror") {
  CounterRng rng(7);
  for (int i = 0; i < 500; ++i) {
    const unsigned w = 3 + static_cast<unsigned>(rng.next_below(20));
    const BitState s(rng.next_u64() & BitState::mask_for(w), w);
    const RuleTable r = RuleTable::from_bits(static_cast<std::uint8_t>(rng.next_below(256)));
    const unsigned k = static_cast<unsigned>(rng.next_below(w));
    CHECK(step(r, s.rotated(k)) == step(r, s).rotated(k));
    CHECK(step(complement_rule(r), s.negated()) == step(r, s).negated());
    CHECK(step(mirror_rule(r), s.reversed()) == step(r, s).reversed());
  }
}

TEST_CASE("canonical rules form 88 orbits") {
  std::set<int> reps;
  for (int n = 0; n < 256; ++n) {
    CHECK(canonical_rule(canonical_rule(n)) == canonical_rule(n));
    CHECK(canonical_rule(n) <= n);
    reps.insert(canonical_rule(n));
  }
  CHECK(reps.size() == 88);
  CHECK(canonical_rule(255) == 0);
  CHECK(canonical_rule(30) == 30);
  CHECK(canonical_rule(86) == 30);
  CHECK(std::set<int>(canonical_rules().begin(), canonical_rules().end()) == reps);
}

TEST_CASE("Wolfram classes") {
  CHECK(wolfram_class(110) == WolframClass::IV);
  CHECK(wolfram_class(30) == WolframClass::III);
  CHECK(wolfram_class(0) == WolframClass::I);
  CHECK(wolfram_class(204) == WolframClass::II);
  for (int n = 0; n < 256; ++n) CHECK(wolfram_class(n) == wolfram_class(canonical_rule(n)));
}

TEST_CASE("shipped class table equals the built-in table and round-trips") {
  const ClassTable file = ClassTable::load(OEE_TEST_CLASS_TABLE);
  CHECK(file == ClassTable::builtin());
  const auto tmp = std::filesystem::temp_directory_path() / "oee_class_roundtrip.txt";
  file.save(tmp);
  CHECK(ClassTable::load(tmp) == file);
  std::filesystem::remove(tmp);
}

TEST_CASE("class table loader rejects malformed files") {
  const auto tmp = std::filesystem::temp_directory_path() / "oee_class_bad.txt";
  {
    std::ofstream out(tmp);
    out << "0 1\n1 9\n";
  }
  CHECK_THROWS_AS(ClassTable::load(tmp), DataError);
  std::filesystem::remove(tmp);
}

TEST_CASE("triplet frequencies") {
  const auto zero = triplet_frequencies(BitState::zeros(5));
  CHECK(zero[7] == Fraction{1, 1});
  for (int i = 0; i < 7; ++i) CHECK(zero[i].num == 0);

  const auto alt = triplet_frequencies(BitState::from_string("0101"));
  CHECK(alt[2] == Fraction{1, 2});  // 101
  CHECK(alt[5] == Fraction{1, 2});  // 010

  CounterRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const unsigned w = 3 + static_cast<unsigned>(rng.next_below(40));
    const BitState s(rng.next_u64() & BitState::mask_for(w), w);
    std::uint64_t sum = 0;
    for (auto f : triplet_frequencies(s)) {
      CHECK(f.den == w);
      sum += f.num;
    }
    CHECK(sum == w);
    CHECK(triplet_counts(s) == triplet_counts(to_wide(s)));
  }
}
