// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include <doctest.h>

#include <algorithm>
#include <random>

#include "gmner/reward.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace gmner;
using testdata::T;
using K = EntityType::Kind;

namespace {

std::vector<EntityTriple> named(const std::vector<std::string>& names) {
  std::vector<EntityTriple> out;
  for (const auto& n : names) out.push_back({n, K::Person, kAbsent});
  return out;
}

void check_unit_interval(const RewardComponents& c) {
  for (double v : {c.count, c.span, c.type, c.ground, c.entail}) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

}  // namespace

TEST_CASE("count reward examples") {
  CHECK(count_reward(2, 2) == 1.0);
  CHECK(count_reward(3, 2) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(count_reward(3, 4) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(count_reward(0, 0) == 1.0);
  CHECK(count_reward(4, 0) == 0.0);
  CHECK(count_reward(0, 3) == 0.0);
  CHECK(count_reward(9, 1) == 0.0);
}

TEST_CASE("count reward matches the table oracle") {
  for (int p = 0; p <= 12; ++p) {
    for (int q = 0; q <= 12; ++q) CHECK(count_reward(p, q) == oracle::count_reward(p, q));
  }
}

TEST_CASE("count reward is 1 only on p == q and falls with the gap") {
  for (int q = 0; q <= 10; ++q) {
    for (int p = 0; p <= 10; ++p) {
      CHECK((count_reward(p, q) == 1.0) == (p == q));
      if (p > q) CHECK(count_reward(p + 1, q) <= count_reward(p, q));
      if (p < q && p > 0) CHECK(count_reward(p, q + 1) <= count_reward(p, q));
    }
  }
}

TEST_CASE("weight tables") {
  CHECK(overcount_weight(0) == 0.0);
  CHECK(overcount_weight(2) == 0.4);
  CHECK(overcount_weight(4) == 0.2);
  CHECK(overcount_weight(7) == 0.1);
  CHECK(undercount_weight(0) == 0.5);
  CHECK(undercount_weight(3) == 0.3);
  CHECK(undercount_weight(5) == 0.2);
}

TEST_CASE("span reward") {
  const auto exact = named({"Spurs", "Iggy"});
  CHECK(span_reward(match_entities(exact, exact), 2, 2) == 1.0);
  const auto m = match_entities(named({"Durant"}), named({"Kevin Durant"}));
  CHECK(span_reward(m, 1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(span_reward(match_entities({}, named({"Spurs"})), 0, 1) == 0.0);
  CHECK(span_reward(match_entities({}, {}), 0, 0) == 1.0);
}

TEST_CASE("type reward") {
  const std::vector<EntityTriple> gold = {T("A", K::Person), T("B", K::Location)};
  CHECK(type_reward(match_entities(gold, gold), gold, gold) == 1.0);
  const std::vector<EntityTriple> half = {T("A", K::Person), T("B", K::Person)};
  CHECK(type_reward(match_entities(half, gold), half, gold) == 0.5);
  const std::vector<EntityTriple> team = {T("A", EntityType::other("team"))};
  const std::vector<EntityTriple> org = {T("A", K::Organization)};
  CHECK(type_reward(match_entities(team, org), team, org) == 0.0);
}

TEST_CASE("grounding reward") {
  const std::vector<EntityTriple> g = {T("A", K::Person, BBox{0, 0, 10, 10})};
  auto with = [](Location l) { return std::vector<EntityTriple>{T("A", K::Person, l)}; };
  auto score = [&](const std::vector<EntityTriple>& p) {
    return grounding_reward(match_entities(p, g), p, g, 0.5);
  };
  CHECK(score(with(BBox{0, 0, 10, 10})) == 1.0);
  CHECK(score(with(BBox{0, 0, 10, 7.5})) == doctest::Approx(0.5).epsilon(1e-12));  // iou 0.75
  CHECK(score(with(BBox{0, 0, 10, 5})) == 0.0);                                      // iou 0.5
  CHECK(score(with(kAbsent)) == 0.0);

  const std::vector<EntityTriple> none = {T("A", K::Person)};
  CHECK(grounding_reward(match_entities(none, none), none, none, 0.5) == 1.0);
}

TEST_CASE("grounding reward is monotone in iou and zero below sigma") {
  const std::vector<EntityTriple> g = {T("A", K::Person, BBox{0, 0, 100, 100})};
  double last = -1.0;
  for (int h = 1; h <= 100; ++h) {
    const std::vector<EntityTriple> p = {T("A", K::Person, BBox{0, 0, 100, double(h)})};
    const double r = grounding_reward(match_entities(p, g), p, g, 0.3);
    CHECK(r >= last);
    if (h <= 30) CHECK(r == 0.0);
    last = r;
  }
}

TEST_CASE("entailment reward") {
  const BBox b{0, 0, 10, 10};
  auto score = [](std::vector<EntityTriple> p, std::vector<EntityTriple> g) {
    return entailment_reward(match_entities(p, g), p, g);
  };
  CHECK(score({T("A", K::Person)}, {T("A", K::Person)}) == 1.0);
  CHECK(score({T("A", K::Person, b), T("B", K::Person, b)},
              {T("A", K::Person, b), T("B", K::Person)}) == 0.5);
  CHECK(score({T("A", K::Person)}, {T("A", K::Person, b)}) == 0.0);
}

TEST_CASE("total reward") {
  const RewardConfig cfg;
  CHECK(total_reward({1, 1, 1, 1, 1}, cfg) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(total_reward({1, 0.6, 1, 0.5, 1}, cfg) == doctest::Approx(0.82).epsilon(1e-15));
  CHECK(total_reward({0, 0, 0, 0, 0}, cfg) == 0.0);
}

TEST_CASE("config validation") {
  RewardConfig c;
  CHECK_NOTHROW(c.validate());
  c.sigma = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.sigma = 0.5;
  c.lambda_type = -0.1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("score_completion on the worked reasoning texts") {
  RewardConfig cfg;
  cfg.lambda_count = 0.1;
  cfg.lambda_entail = 0.3;
  for (const char* text : {testdata::kThoughtProcessV1, testdata::kThoughtProcessV2}) {
    const auto b = score_completion(text, ReasoningStyle::Conclusion, testdata::spurs_sample(), cfg);
    CHECK(b.format_ok);
    CHECK(b.components.count == 1.0);
    CHECK(b.components.span == 1.0);
    CHECK(b.components.type == 1.0);
    CHECK(b.components.ground == 1.0);
    CHECK(b.components.entail == 1.0);
    CHECK(b.total == doctest::Approx(cfg.weight_sum()).epsilon(1e-15));
  }
}

TEST_CASE("format failure yields the penalty") {
  RewardConfig cfg;
  cfg.format_penalty = 0.05;
  const auto b = score_completion("no answer here", ReasoningStyle::Formal, testdata::spurs_sample(), cfg);
  CHECK_FALSE(b.format_ok);
  CHECK(b.total == 0.05);
  CHECK(b.components.span == 0.0);
}

TEST_CASE("three predictions against two golds with one partial span") {
  const auto sample = testdata::sample_with(
      {T("Kevin Durant", K::Person, BBox{0, 0, 10, 10}), T("Spurs", K::Organization)});
  const std::vector<EntityTriple> pred = {T("Durant", K::Person, BBox{0, 0, 10, 10}),
                                          T("Spurs", K::Organization), T("Iggy", K::Person)};
  const auto b = score_prediction(pred, sample, RewardConfig{});
  CHECK(b.p == 3);
  CHECK(b.q == 2);
  CHECK(b.k == 2);
  CHECK(b.components.count == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(b.components.span == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0).epsilon(1e-12));
  CHECK(b.components.type == 1.0);
  CHECK(b.components.ground == 1.0);
  CHECK(b.components.entail == 1.0);
}

TEST_CASE("components stay in [0, 1] and total in [0, 1] for random pairs") {
  std::mt19937_64 rng(31);
  const RewardConfig cfg;
  for (int n = 0; n < 2000; ++n) {
    const auto sample = testdata::sample_with(testdata::random_triples(rng, 5));
    const auto b = score_prediction(testdata::random_triples(rng, 6), sample, cfg);
    check_unit_interval(b.components);
    CHECK(b.total >= 0.0);
    CHECK(b.total <= 1.0 + 1e-12);
  }
}

TEST_CASE("perfect predictions score 1 on every component") {
  std::mt19937_64 rng(32);
  for (int n = 0; n < 1000; ++n) {
    const auto gold = testdata::random_distinct_gold(rng, 4);
    auto pred = gold;
    std::shuffle(pred.begin(), pred.end(), rng);
    const auto b = score_prediction(pred, testdata::sample_with(gold), RewardConfig{});
    CHECK(b.components.count == 1.0);
    CHECK(b.components.span == 1.0);
    CHECK(b.components.type == 1.0);
    CHECK(b.components.ground == 1.0);
    CHECK(b.components.entail == 1.0);
  }
}

TEST_CASE("predicted boxes outside the image are clamped with a diagnostic") {
  const auto sample = testdata::sample_with({T("A", K::Person, BBox{50, 50, 100, 100})});
  const auto b = score_prediction({T("A", K::Person, BBox{50, 50, 140, 100})}, sample, RewardConfig{});
  CHECK(b.components.ground == 1.0);
  CHECK_FALSE(b.diagnostics.empty());
}
