// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

// Acceptance gate. Each criterion prints one PASS/FAIL line; the exit status
// is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "gmner/completion_parser.hpp"
#include "gmner/grpo.hpp"
#include "gmner/metrics.hpp"
#include "gmner/reward.hpp"
#include "gmner/span_matching.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace gmner;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<EntityTriple> named(const std::vector<std::string>& names) {
  std::vector<EntityTriple> out;
  for (const auto& n : names) out.push_back({n, EntityType::Kind::Person, kAbsent});
  return out;
}

// 1. Assignment optimality against exhaustive enumeration.
Outcome hungarian_optimality() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> size(0, 6);
  const int instances = 2000;
  for (int n = 0; n < instances && o.pass; ++n) {
    std::vector<std::string> p(size(rng)), g(size(rng));
    for (auto& s : p) s = testdata::random_span(rng);
    for (auto& s : g) s = testdata::random_span(rng);
    const Matching m = match_entities(named(p), named(g));
    oracle::Rational got;
    for (const auto& pair : m.pairs) {
      got = got + oracle::f1_exact(pair.score.overlap, pair.score.pred_tokens, pair.score.gold_tokens);
    }
    o.require(got == oracle::best_total_f1(p, g), "instance " + std::to_string(n) + " not optimal");
  }
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "took " + fmt(secs) + " s");
  if (o.pass) o.detail = std::to_string(instances) + " instances exact, " + fmt(secs) + " s";
  return o;
}

// 2. Count reward over [0, 8]^2.
Outcome count_reward_table() {
  Outcome o;
  for (int p = 0; p <= 8; ++p) {
    for (int q = 0; q <= 8; ++q) {
      o.require(count_reward(p, q) == oracle::count_reward(p, q),
                "p=" + std::to_string(p) + " q=" + std::to_string(q));
    }
  }
  // a few entries evaluated by hand
  o.require(count_reward(2, 2) == 1.0, "(2,2)");
  o.require(count_reward(3, 2) == 1.0 - 0.4, "(3,2)");
  o.require(count_reward(3, 4) == 1.0 - 0.3, "(3,4)");
  o.require(count_reward(8, 1) == 0.0, "(8,1)");
  o.require(count_reward(0, 5) == 0.0, "(0,5)");
  o.require(count_reward(5, 0) == 0.0, "(5,0)");
  o.require(count_reward(8, 5) == 1.0 - 3 * 0.1, "(8,5)");
  o.require(count_reward(5, 8) == 1.0 - 3 * 0.2, "(5,8)");
  if (o.pass) o.detail = "81 cells exact";
  return o;
}

// 3. Component bounds and perfect predictions.
Outcome reward_bounds() {
  Outcome o;
  std::mt19937_64 rng(1003);
  const RewardConfig cfg;
  for (int n = 0; n < 10000 && o.pass; ++n) {
    const auto sample = testdata::sample_with(testdata::random_triples(rng, 6));
    const auto b = score_prediction(testdata::random_triples(rng, 6), sample, cfg);
    const auto& c = b.components;
    for (double v : {c.count, c.span, c.type, c.ground, c.entail}) {
      o.require(v >= 0.0 && v <= 1.0, "component out of range at pair " + std::to_string(n));
    }
  }
  for (int n = 0; n < 10000 && o.pass; ++n) {
    const auto gold = testdata::random_distinct_gold(rng, 4);
    auto pred = gold;
    std::shuffle(pred.begin(), pred.end(), rng);
    const auto c = score_prediction(pred, testdata::sample_with(gold), cfg).components;
    o.require(c.count == 1.0 && c.span == 1.0 && c.type == 1.0 && c.ground == 1.0 && c.entail == 1.0,
              "perfect prediction " + std::to_string(n) + " below 1");
  }
  if (o.pass) o.detail = "10000 random pairs in [0,1]; 10000 perfect predictions all 1";
  return o;
}

// 4. Advantage normalisation.
Outcome advantage_normalisation() {
  Outcome o;
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<int> size(2, 64);
  std::uniform_real_distribution<double> u(0, 1), shift(-5, 5), scale(0.1, 10);
  for (int n = 0; n < 2000 && o.pass; ++n) {
    std::vector<double> r(static_cast<std::size_t>(size(rng)));
    for (auto& x : r) x = u(rng);
    const auto a = group_advantages(r);
    o.require(std::abs(oracle::mean(a)) <= 1e-9, "mean");
    o.require(std::abs(oracle::population_std(a) - 1.0) <= 1e-9, "std");
    const double c = shift(rng), k = scale(rng);
    std::vector<double> moved = r;
    for (auto& x : moved) x = k * x + c;
    const auto b = group_advantages(moved);
    for (std::size_t i = 0; i < r.size(); ++i) o.require(std::abs(a[i] - b[i]) <= 1e-9, "invariance");
  }
  for (int n = 0; n < 200 && o.pass; ++n) {
    const std::vector<double> flat(static_cast<std::size_t>(size(rng)), u(rng));
    const auto a = group_advantages(flat);
    o.require(std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; }), "zero variance");
  }
  if (o.pass) o.detail = "2000 groups within 1e-9; 200 constant groups all zero";
  return o;
}

// 5. Filter thresholds.
Outcome filter_thresholds() {
  Outcome o;
  const FilterThresholds t;
  o.require(filter_group(std::vector<double>{1.0, 0.2, 0.1, 0.0}, t).keep, "[1,.2,.1,0] dropped");
  const auto flat = filter_group(std::vector<double>{0.9, 0.9, 0.9, 0.9}, t);
  o.require(!flat.keep && !flat.std_ok, "[.9,.9,.9,.9] not dropped on std");
  const auto high = filter_group(std::vector<double>{0.9, 0.9, 0.8, 0.7}, t);
  // this group's std (about 0.083) also sits under 0.1; the median test must fail on its own
  o.require(!high.keep && !high.median_ok && high.max_ok, "[.9,.9,.8,.7] not dropped on median");
  const auto median_only = filter_group(std::vector<double>{0.9, 0.9, 0.8, 0.7}, FilterThresholds{0.05, 0.8, 0.08, 0.6});
  o.require(!median_only.keep && median_only.std_ok, "median bound alone does not drop [.9,.9,.8,.7]");

  // thresholds set to the group's own statistics must still keep it
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 500 && o.pass; ++n) {
    std::vector<double> r(6);
    for (auto& x : r) x = u(rng);
    const auto s = group_stats(r);
    const FilterThresholds exact{s.std, s.max, s.median, s.median};
    o.require(filter_group(r, exact).keep, "boundary not inclusive");
    FilterThresholds above = exact;
    above.min_std = std::nextafter(s.std, 2.0);
    o.require(!filter_group(r, above).keep, "std bound not enforced");
    above = exact;
    above.min_max = std::nextafter(s.max, 2.0);
    o.require(!filter_group(r, above).keep, "max bound not enforced");
    above = exact;
    above.median_low = above.median_high = std::nextafter(s.median, 2.0);
    o.require(!filter_group(r, above).keep, "median bound not enforced");
  }
  if (o.pass) o.detail = "worked groups classified; 500 boundary checks inclusive";
  return o;
}

// 6. Clipped surrogate.
Outcome clipped_surrogate_check() {
  Outcome o;
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> ratio(0.05, 3.0), adv(-4, 4), eps(0.01, 0.6);
  std::uniform_int_distribution<int> len(1, 64);
  for (int n = 0; n < 1000 && o.pass; ++n) {
    const ClipConfig c{eps(rng), eps(rng)};
    std::vector<double> r(static_cast<std::size_t>(len(rng)));
    for (auto& x : r) x = ratio(rng);
    const double a = adv(rng);
    o.require(std::abs(clipped_surrogate(r, a, c) - oracle::surrogate(r, a, c.eps_low, c.eps_high)) <= 1e-12,
              "instance " + std::to_string(n));

    std::uniform_real_distribution<double> inside(1 - c.eps_low, 1 + c.eps_high);
    double plain = 0.0;
    for (auto& x : r) {
      x = inside(rng);
      plain += x * a;
    }
    plain /= static_cast<double>(r.size());
    o.require(std::abs(clipped_surrogate(r, a, c) - plain) <= 1e-12, "in-band instance " + std::to_string(n));
  }
  if (o.pass) o.detail = "1000 instances within 1e-12; in-band equals unclipped mean";
  return o;
}

// 7. Parser fidelity and round trip.
Outcome parser_fidelity() {
  Outcome o;
  const auto expected = testdata::spurs_gold();
  for (const char* text : {testdata::kThoughtProcessV1, testdata::kThoughtProcessV2}) {
    const auto p = parse_completion(text, ReasoningStyle::Conclusion);
    o.require(p.format_ok && p.answer == expected, "worked reasoning text misparsed");
  }
  std::mt19937_64 rng(1007);
  for (int n = 0; n < 10000 && o.pass; ++n) {
    const auto triples = testdata::random_triples(rng, 6);
    const auto p = parse_completion(wrap_in_answer(serialize_answer(triples)), ReasoningStyle::Formal);
    o.require(p.format_ok && p.answer == triples, "round trip " + std::to_string(n));
  }
  if (o.pass) o.detail = "both reasoning texts exact; 10000 round trips";
  return o;
}

// 8. Metric counts on the micro-corpus and the correctness implication chain.
Outcome metric_oracle() {
  Outcome o;
  const auto c = testdata::micro_corpus();
  o.require(evaluate_corpus(c.predictions, c.samples, TaskMode::GMNER).counts == Counts{6, 13, 12}, "GMNER counts");
  o.require(evaluate_corpus(c.predictions, c.samples, TaskMode::MNER).counts == Counts{8, 13, 12}, "MNER counts");
  o.require(evaluate_corpus(c.predictions, c.samples, TaskMode::EEG).counts == Counts{7, 13, 12}, "EEG counts");

  std::mt19937_64 rng(1008);
  for (int n = 0; n < 10000 && o.pass; ++n) {
    std::vector<GmnerSample> samples;
    std::vector<SamplePrediction> preds;
    for (int i = 0; i < 3; ++i) {
      auto s = testdata::sample_with(testdata::random_triples(rng, 4));
      s.id = std::to_string(i);
      auto p = testdata::random_triples(rng, 4);
      // reuse gold entities so that correct pairs actually occur
      for (std::size_t k = 0; k < p.size() && k < s.gold.size(); ++k) {
        if (rng() % 2) p[k].entity = s.gold[k].entity;
        if (rng() % 2) p[k].etype = s.gold[k].etype;
        if (rng() % 2) p[k].loc = s.gold[k].loc;
      }
      for (const auto& pt : p) {
        for (const auto& gt : s.gold) {
          if (triple_correct(pt, gt, TaskMode::GMNER)) {
            o.require(triple_correct(pt, gt, TaskMode::MNER) && triple_correct(pt, gt, TaskMode::EEG),
                      "pair implication");
          }
        }
      }
      preds.push_back({s.id, std::move(p)});
      samples.push_back(std::move(s));
    }
    const auto g = evaluate_corpus(preds, samples, TaskMode::GMNER).counts.correct;
    o.require(g <= evaluate_corpus(preds, samples, TaskMode::MNER).counts.correct &&
                  g <= evaluate_corpus(preds, samples, TaskMode::EEG).counts.correct,
              "corpus " + std::to_string(n) + " count implication");
  }
  if (o.pass) o.detail = "hand counts exact; 10000 corpora respect the implication";
  return o;
}

// 9. Bias metrics.
Outcome bias_metrics() {
  Outcome o;
  const auto c = testdata::micro_corpus();
  const auto t = textual_bias_prf(c.predictions, c.samples);
  o.require(t.counts == Counts{3, 6, 3}, "None-triple counts");
  o.require(t.n_pre == 0.5 && t.n_rec == 1.0 && t.n_f1 == 2.0 * 0.5 * 1.0 / 1.5, "(0.5, 1.0, 2/3)");
  const auto v = visual_bias_stats(c.predictions, c.samples);
  o.require(v.n_count == 1 && v.total_recalled == 13, "N-Count");
  o.require(v.n_rate == static_cast<double>(v.n_count) / static_cast<double>(v.total_recalled), "N-Rate");
  if (o.pass) o.detail = "N-Pre 0.5, N-Rec 1, N-F1 2/3, N-Count 1 of 13";
  return o;
}

// 10. IoU against rasterisation.
Outcome iou_oracle() {
  Outcome o;
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> c(0, 100);
  auto gen = [&] {
    int x1, x2, y1, y2;
    do {
      x1 = c(rng);
      x2 = c(rng);
    } while (x1 == x2);
    do {
      y1 = c(rng);
      y2 = c(rng);
    } while (y1 == y2);
    return oracle::IntBox{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
  };
  auto box = [](const oracle::IntBox& b) {
    return BBox{double(b.x1), double(b.y1), double(b.x2), double(b.y2)};
  };
  for (int n = 0; n < 1000 && o.pass; ++n) {
    const auto a = gen(), b = gen();
    const double v = iou(box(a), box(b));
    o.require(std::abs(v - oracle::pixel_iou(a, b)) <= 1e-9, "pair " + std::to_string(n));
    o.require(v == iou(box(b), box(a)), "symmetry");
    o.require(iou(box(a), box(a)) == 1.0, "self iou");
  }
  if (o.pass) o.detail = "1000 pairs within 1e-9; symmetric; self-iou 1";
  return o;
}

// 11. End-to-end CLI determinism.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool run_pipeline(const fs::path& dir, int threads, std::string& error) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = "\"" + std::string(GMNER_CLI_PATH) + "\"";
  const fs::path fx = GMNER_FIXTURE_DIR;
  auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  const std::string common = " --threads " + std::to_string(threads) + " --config " + q(fx / "config.json");
  const std::vector<std::string> steps = {
      "parse --in " + q(fx / "completions.jsonl") + " --out " + q(dir / "parsed.jsonl"),
      "score --pred " + q(fx / "groups.jsonl") + " --gold " + q(fx / "samples.jsonl") + " --out " +
          q(dir / "rewards.jsonl"),
      "filter --groups " + q(dir / "rewards.jsonl") + " --out " + q(dir / "kept.jsonl") + " --report " +
          q(dir / "filter_stats.json"),
      "advantage --groups " + q(dir / "kept.jsonl") + " --out " + q(dir / "advantages.jsonl"),
      "eval --pred " + q(dir / "parsed.jsonl") + " --gold " + q(fx / "samples.jsonl") +
          " --mode gmner --out " + q(dir / "report.json"),
  };
  for (const auto& step : steps) {
    const std::string cmd = cli + " " + step + common + " 2>> " + q(dir / "stderr.txt");
    const int raw = std::system(cmd.c_str());
    if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) {
      error = "step failed: " + step.substr(0, step.find(' '));
      return false;
    }
  }
  return true;
}

Outcome end_to_end_determinism() {
  Outcome o;
  const auto t0 = Clock::now();
  const fs::path root = fs::path(GMNER_WORK_DIR) / "acceptance_e2e";
  const std::vector<std::pair<std::string, int>> runs = {{"run1_t1", 1}, {"run2_t1", 1}, {"run3_t4", 4}};
  for (const auto& [name, threads] : runs) {
    std::string error;
    o.require(run_pipeline(root / name, threads, error), error);
  }
  const std::vector<std::string> outputs = {"parsed.jsonl", "rewards.jsonl", "kept.jsonl",
                                            "filter_stats.json", "advantages.jsonl", "report.json"};
  std::size_t bytes = 0;
  for (const auto& f : outputs) {
    const std::string ref = slurp(root / runs[0].first / f);
    o.require(!ref.empty(), f + " is empty");
    bytes += ref.size();
    for (std::size_t i = 1; i < runs.size(); ++i) {
      o.require(slurp(root / runs[i].first / f) == ref, f + " differs in " + runs[i].first);
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "took " + fmt(secs) + " s");
  if (o.pass) {
    o.detail = "3 runs (threads 1, 1, 4) byte-identical over " + std::to_string(outputs.size()) +
               " outputs, " + std::to_string(bytes) + " bytes, " + fmt(secs) + " s";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"hungarian matching optimality", hungarian_optimality},
      {"count reward table", count_reward_table},
      {"reward bounds and perfection", reward_bounds},
      {"advantage normalisation", advantage_normalisation},
      {"filter thresholds", filter_thresholds},
      {"clipped surrogate", clipped_surrogate_check},
      {"parser fidelity", parser_fidelity},
      {"metric oracle", metric_oracle},
      {"bias metrics", bias_metrics},
      {"iou oracle", iou_oracle},
      {"end-to-end determinism", end_to_end_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
