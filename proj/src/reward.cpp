// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/reward.hpp"

#include <algorithm>
#include <cmath>

namespace gmner {

void RewardConfig::validate() const {
  const double weights[] = {lambda_count, lambda_span, lambda_type, lambda_ground, lambda_entail};
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0) throw ValidationError("reward weights must be finite and >= 0");
  }
  if (!(sigma >= 0.0 && sigma < 1.0)) throw ValidationError("sigma must lie in [0, 1)");
  if (!std::isfinite(format_penalty)) throw ValidationError("format_penalty must be finite");
}

double RewardConfig::weight_sum() const {
  return lambda_count + lambda_span + lambda_type + lambda_ground + lambda_entail;
}

double overcount_weight(std::size_t q) {
  if (q >= 1 && q <= 2) return 0.4;
  if (q >= 3 && q <= 4) return 0.2;
  if (q >= 5) return 0.1;
  return 0.0;
}

double undercount_weight(std::size_t p) {
  if (p <= 2) return 0.5;
  if (p <= 4) return 0.3;
  return 0.2;
}

double count_reward(std::size_t p, std::size_t q) {
  if (p == q) return 1.0;
  if (p > q && q > 0) {
    return std::max(0.0, 1.0 - static_cast<double>(p - q) * overcount_weight(q));
  }
  if (p > 0 && p < q) {
    return std::max(0.0, 1.0 - static_cast<double>(q - p) * undercount_weight(p));
  }
  return 0.0;
}

namespace {

// Matched-pair rewards are undefined at k = 0: empty-on-empty is perfect, anything else scores 0.
double empty_matching_value(std::size_t num_preds, std::size_t num_golds) {
  return num_preds == 0 && num_golds == 0 ? 1.0 : 0.0;
}

template <class PairScore>
double mean_over_pairs(const Matching& m, std::size_t num_preds, std::size_t num_golds,
                       PairScore&& score) {
  if (m.k() == 0) return empty_matching_value(num_preds, num_golds);
  double sum = 0.0;
  for (const auto& pair : m.pairs) sum += score(pair);
  return std::clamp(sum / static_cast<double>(m.k()), 0.0, 1.0);
}

}  // namespace

double span_reward(const Matching& matching, std::size_t num_preds, std::size_t num_golds) {
  return mean_over_pairs(matching, num_preds, num_golds,
                         [](const MatchedPair& p) { return p.score.f1; });
}

double type_reward(const Matching& matching, const std::vector<EntityTriple>& preds,
                   const std::vector<EntityTriple>& golds) {
  return mean_over_pairs(matching, preds.size(), golds.size(), [&](const MatchedPair& p) {
    return types_match(preds[p.pred_index].etype, golds[p.gold_index].etype) ? 1.0 : 0.0;
  });
}

double grounding_reward(const Matching& matching, const std::vector<EntityTriple>& preds,
                        const std::vector<EntityTriple>& golds, double sigma) {
  if (!(sigma >= 0.0 && sigma < 1.0)) throw ValidationError("sigma must lie in [0, 1)");
  return mean_over_pairs(matching, preds.size(), golds.size(), [&](const MatchedPair& p) {
    const Location& pl = preds[p.pred_index].loc;
    const Location& gl = golds[p.gold_index].loc;
    if (!pl && !gl) return 1.0;
    if (!pl || !gl) return 0.0;
    return std::max(0.0, (iou_or_zero(*pl, *gl) - sigma) / (1.0 - sigma));
  });
}

double entailment_reward(const Matching& matching, const std::vector<EntityTriple>& preds,
                         const std::vector<EntityTriple>& golds) {
  return mean_over_pairs(matching, preds.size(), golds.size(), [&](const MatchedPair& p) {
    return preds[p.pred_index].loc.has_value() == golds[p.gold_index].loc.has_value() ? 1.0 : 0.0;
  });
}

double total_reward(const RewardComponents& c, const RewardConfig& config) {
  return config.lambda_count * c.count + config.lambda_span * c.span +
         config.lambda_type * c.type + config.lambda_ground * c.ground +
         config.lambda_entail * c.entail;
}

RewardBreakdown score_prediction(const std::vector<EntityTriple>& predicted,
                                 const GmnerSample& sample, const RewardConfig& config) {
  config.validate();
  RewardBreakdown out;
  out.format_ok = true;

  std::vector<EntityTriple> preds = predicted;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].loc && clamp_to_image(*preds[i].loc, sample.image_width, sample.image_height)) {
      out.diagnostics.push_back("predicted box " + std::to_string(i) + " clamped to image bounds");
    }
  }

  const auto& golds = sample.gold;
  const Matching m = match_entities(preds, golds);
  out.p = preds.size();
  out.q = golds.size();
  out.k = m.k();
  out.components.count = count_reward(out.p, out.q);
  out.components.span = span_reward(m, out.p, out.q);
  out.components.type = type_reward(m, preds, golds);
  out.components.ground = grounding_reward(m, preds, golds, config.sigma);
  out.components.entail = entailment_reward(m, preds, golds);
  out.total = total_reward(out.components, config);
  return out;
}

RewardBreakdown score_completion(std::string_view completion, ReasoningStyle style,
                                 const GmnerSample& sample, const RewardConfig& config) {
  config.validate();
  ParsedCompletion parsed = parse_completion(completion, style);
  if (!parsed.format_ok) {
    RewardBreakdown out;
    out.format_ok = false;
    out.p = parsed.answer.size();
    out.q = sample.gold.size();
    out.total = config.format_penalty;
    out.diagnostics = std::move(parsed.diagnostics);
    return out;
  }
  RewardBreakdown out = score_prediction(parsed.answer, sample, config);
  out.diagnostics.insert(out.diagnostics.begin(), parsed.diagnostics.begin(),
                         parsed.diagnostics.end());
  return out;
}

}  // namespace gmner
