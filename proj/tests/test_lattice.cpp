#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ragrules/lattice.hpp"
#include "support/reference.hpp"

using namespace ragrules;

TEST_CASE("masks render and index one-based") {
  const SourceMask m(0b0110, 4);
  CHECK(m.indices() == std::vector<int>{2, 3});
  CHECK(to_string(m) == "{2,3}");
  CHECK(to_string(SourceMask::empty(3)) == "{}");
  CHECK(SourceMask::from_indices({2, 3}, 4) == m);
  CHECK(m.complement() == SourceMask(0b1001, 4));
  CHECK(SourceMask::full(64).popcount() == 64);
  CHECK(SourceMask::full(64).complement() == SourceMask::empty(64));
}

TEST_CASE("mask construction rejects bad input") {
  CHECK_THROWS_AS(SourceMask(0b1000, 3), std::invalid_argument);
  CHECK_THROWS_AS(SourceMask(0, 65), std::invalid_argument);
  CHECK_THROWS_AS(SourceMask::from_indices({0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(SourceMask::from_indices({4}, 3), std::invalid_argument);
}

TEST_CASE("interpretations parse") {
  CHECK(parse_interpretation("retention") == Interpretation::kRetention);
  CHECK(parse_interpretation("omission") == Interpretation::kOmission);
  CHECK_THROWS_AS(parse_interpretation("both"), std::invalid_argument);
}

TEST_CASE("levels have binomial sizes and ascending order") {
  for (int n = 0; n <= 10; ++n) {
    std::uint64_t total = 0;
    for (int l = 0; l <= n; ++l) {
      const auto level = enumerate_level(n, l);
      CHECK(level.size() == binomial(n, l));
      CHECK(std::is_sorted(level.begin(), level.end()));
      for (const auto& m : level) CHECK(m.popcount() == l);
      total += level.size();
    }
    CHECK(total == (std::uint64_t{1} << n));
  }
  CHECK(enumerate_level(0, 0) == std::vector<SourceMask>{SourceMask::empty(0)});
  CHECK(enumerate_level(64, 64).size() == 1);
  CHECK(enumerate_level(64, 1).size() == 64);
  CHECK_THROWS_AS(enumerate_level(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_level(65, 0), std::invalid_argument);
}

TEST_CASE("children and parents are immediate neighbours") {
  const SourceMask m(0b0101, 4);
  CHECK(children(m) == std::vector<SourceMask>{SourceMask(0b0001, 4),
                                               SourceMask(0b0100, 4)});
  CHECK(parents(m) == std::vector<SourceMask>{SourceMask(0b0111, 4),
                                              SourceMask(0b1101, 4)});
  CHECK(children(SourceMask::empty(4)).empty());
  CHECK(parents(SourceMask::full(4)).empty());
}

TEST_CASE("concrete input under both interpretations") {
  const InputSet s = InputSet::from_texts({"a", "b", "c"}, {});
  const SourceMask m(0b010, 3);
  CHECK(concrete_input(m, Interpretation::kRetention, s) == std::vector<std::string>{"b"});
  CHECK(concrete_input(m, Interpretation::kOmission, s) ==
        std::vector<std::string>{"a", "c"});
  CHECK(concrete_input(SourceMask::empty(3), Interpretation::kOmission, s).size() == 3);
  CHECK(concrete_input(SourceMask::empty(3), Interpretation::kRetention, s).empty());
  CHECK_THROWS_AS(concrete_input(SourceMask(0, 2), Interpretation::kRetention, s),
                  std::invalid_argument);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t bits = rng() & 0b111;
    const SourceMask x(bits, 3);
    CHECK(concrete_input(x, Interpretation::kRetention, s) ==
          concrete_input(x.complement(), Interpretation::kOmission, s));
  }
}

TEST_CASE("input sets cap at 64 sources and label by position") {
  CHECK_THROWS_AS(InputSet::from_texts(std::vector<std::string>(65, "x"), {}),
                  std::invalid_argument);
  const auto s = InputSet::from_texts({"a", "b"}, {"q", "i"});
  CHECK(s.sources()[1].label == "s2");
  CHECK(s.context().question == "q");
}

TEST_CASE("subsumption is a partial order over random masks") {
  std::mt19937_64 rng(5);
  const auto rule = [](std::uint64_t bits) {
    return Rule{Interpretation::kRetention, SourceMask(bits, 8), false};
  };
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = rule(rng() & 0xff), b = rule(rng() & 0xff), c = rule(rng() & 0xff);
    CHECK(subsumes(a, a));
    if (subsumes(a, b) && subsumes(b, a)) CHECK(a.mask == b.mask);
    if (subsumes(a, b) && subsumes(b, c)) CHECK(subsumes(a, c));
  }
  const Rule ret{Interpretation::kRetention, SourceMask(1, 3), false};
  const Rule omi{Interpretation::kOmission, SourceMask(1, 3), false};
  CHECK_THROWS_AS(subsumes(ret, omi), std::invalid_argument);
  CHECK_THROWS_AS(subsumes(ret, Rule{Interpretation::kRetention, SourceMask(1, 4), false}),
                  std::invalid_argument);
}

TEST_CASE("minimal rules form an antichain whose up-closure is the valid set") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto sat = reference::random_satisfaction(n, rng, 0.85);
    const auto valid = reference::rules(n, sat, Interpretation::kRetention);
    std::vector<SourceMask> masks;
    for (auto b : valid) masks.emplace_back(b, n);
    std::shuffle(masks.begin(), masks.end(), rng);
    masks.insert(masks.end(), masks.begin(), masks.begin() + masks.size() / 2);

    const auto minimal = minimal_rules(masks);
    CHECK(std::is_sorted(minimal.begin(), minimal.end()));
    CHECK(reference::bits_of(minimal) == reference::minimal(valid));
    for (const auto& a : minimal) {
      for (const auto& b : minimal) {
        if (a != b) CHECK_FALSE(a.is_subset_of(b));
      }
    }
    std::set<std::uint64_t> closure;
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
      for (const auto& m : minimal) {
        if ((c & m.bits()) == m.bits()) closure.insert(c);
      }
    }
    CHECK(std::vector<std::uint64_t>(closure.begin(), closure.end()) == valid);
  }
  CHECK(minimal_rules({}).empty());
}
