// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include <doctest.h>

#include <random>

#include "gmner/core.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace gmner;
using testdata::T;
using K = EntityType::Kind;

TEST_CASE("iou of identical, disjoint and half-shifted boxes") {
  CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == 1.0);
  CHECK(iou({0, 0, 10, 10}, {20, 20, 30, 30}) == 0.0);
  CHECK(iou({0, 0, 10, 10}, {5, 0, 15, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("boxes touching on an edge or a corner have iou 0") {
  CHECK(iou({0, 0, 10, 10}, {10, 0, 20, 10}) == 0.0);
  CHECK(iou({0, 0, 10, 10}, {10, 10, 20, 20}) == 0.0);
}

TEST_CASE("iou rejects degenerate and non-finite boxes") {
  CHECK_THROWS_AS(iou({0, 0, 0, 10}, {0, 0, 10, 10}), ValidationError);
  CHECK_THROWS_AS(iou({0, 0, 10, 10}, {5, 5, 4, 9}), ValidationError);
  CHECK_THROWS_AS(iou({0, 0, NAN, 10}, {0, 0, 10, 10}), ValidationError);
  CHECK(iou_or_zero({0, 0, 0, 10}, {0, 0, 10, 10}) == 0.0);
}

TEST_CASE("iou matches the rasterised oracle, is symmetric and self-iou is 1") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> c(0, 100);
  for (int n = 0; n < 300; ++n) {
    auto gen = [&] {
      int x1 = c(rng), x2 = c(rng), y1 = c(rng), y2 = c(rng);
      if (x1 == x2) x2 = x1 == 100 ? 99 : x1 + 1;
      if (y1 == y2) y2 = y1 == 100 ? 99 : y1 + 1;
      return oracle::IntBox{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
    };
    const auto a = gen(), b = gen();
    const BBox ba{double(a.x1), double(a.y1), double(a.x2), double(a.y2)};
    const BBox bb{double(b.x1), double(b.y1), double(b.x2), double(b.y2)};
    CHECK(std::abs(iou(ba, bb) - oracle::pixel_iou(a, b)) <= 1e-9);
    CHECK(iou(ba, bb) == iou(bb, ba));
    CHECK(iou(ba, ba) == 1.0);
  }
}

TEST_CASE("contained box has iou equal to the area ratio") {
  const BBox inner{10, 10, 20, 30}, outer{0, 0, 40, 40};
  CHECK(iou(inner, outer) == doctest::Approx(200.0 / 1600.0).epsilon(1e-12));
}

TEST_CASE("triple correctness per mode") {
  const auto spurs = T("Spurs", K::Organization, BBox{405, 216, 558, 324});
  CHECK(triple_correct(spurs, spurs, TaskMode::GMNER));
  const auto pl = T("Premier League", K::Organization);
  CHECK(triple_correct(pl, pl, TaskMode::GMNER));
  const auto off = T("Spurs", K::Organization, BBox{0, 0, 10, 10});
  CHECK_FALSE(triple_correct(off, spurs, TaskMode::EEG));
  CHECK(triple_correct(off, spurs, TaskMode::MNER));
  CHECK_FALSE(triple_correct(T("Spurs", K::Person, spurs.loc), spurs, TaskMode::MNER));
  CHECK(triple_correct(T("Spurs", K::Person, spurs.loc), spurs, TaskMode::EEG));
}

TEST_CASE("one side Absent fails location; iou at the threshold passes") {
  CHECK_FALSE(location_correct(kAbsent, BBox{0, 0, 10, 10}));
  CHECK_FALSE(location_correct(BBox{0, 0, 10, 10}, kAbsent));
  CHECK(location_correct(kAbsent, kAbsent));
  CHECK(location_correct(BBox{0, 0, 10, 10}, BBox{0, 0, 10, 5}));  // iou 0.5
  CHECK_FALSE(location_correct(BBox{0, 0, 10, 10}, BBox{0, 0, 10, 4}));
  CHECK_THROWS_AS(location_correct(kAbsent, kAbsent, 0.0), ValidationError);
  CHECK_THROWS_AS(location_correct(kAbsent, kAbsent, 1.5), ValidationError);
}

TEST_CASE("entity match trims and collapses whitespace but keeps case") {
  CHECK(normalize_entity("  New \t York  ") == "New York");
  CHECK(triple_correct(T(" New  York", K::Location), T("New York", K::Location), TaskMode::MNER));
  CHECK_FALSE(triple_correct(T("new york", K::Location), T("New York", K::Location), TaskMode::MNER));
}

TEST_CASE("Other types never match, even each other") {
  const auto team = EntityType::other("team");
  CHECK_FALSE(types_match(team, team));
  CHECK_FALSE(types_match(team, K::Organization));
  CHECK(EntityType::parse(" Organization ") == EntityType(K::Organization));
  CHECK(EntityType::parse("team").str() == "team");
  CHECK_FALSE(EntityType::parse("team").canonical());
}

TEST_CASE("GMNER correctness implies MNER and EEG on small enumerations") {
  const std::vector<std::string> names = {"Spurs", "Spurs ", "Iggy"};
  const std::vector<EntityType> types = {K::Person, K::Organization, EntityType::other("x")};
  const std::vector<Location> locs = {kAbsent, BBox{0, 0, 10, 10}, BBox{0, 0, 10, 6},
                                      BBox{50, 50, 60, 60}};
  for (const auto& e1 : names)
    for (const auto& t1 : types)
      for (const auto& l1 : locs)
        for (const auto& e2 : names)
          for (const auto& t2 : types)
            for (const auto& l2 : locs) {
              const EntityTriple p{e1, t1, l1}, g{e2, t2, l2};
              if (triple_correct(p, g, TaskMode::GMNER)) {
                CHECK(triple_correct(p, g, TaskMode::MNER));
                CHECK(triple_correct(p, g, TaskMode::EEG));
              }
            }
}

TEST_CASE("sample validation") {
  GmnerSample s = testdata::sample_with({T("A", K::Person, BBox{0, 0, 10, 10})});
  CHECK_NOTHROW(s.validate());
  s.gold[0].loc = BBox{0, 0, 120, 10};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.gold[0].loc = BBox{0, 0, 10, 10};
  s.image_width = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  CHECK_THROWS_AS((EntityTriple{"", K::Person, kAbsent}.validate()), ValidationError);
}

TEST_CASE("clamp_to_image") {
  BBox b{-5, 10, 120, 50};
  CHECK(clamp_to_image(b, 100, 100));
  CHECK(b == BBox{0, 10, 100, 50});
  CHECK_FALSE(clamp_to_image(b, 100, 100));
}

TEST_CASE("task mode names round trip") {
  for (auto m : {TaskMode::GMNER, TaskMode::MNER, TaskMode::EEG}) {
    CHECK(parse_task_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_task_mode("ner"), ValidationError);
}
