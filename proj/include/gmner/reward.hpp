#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

/**
 * @file reward.hpp
 * @brief Rule-based verifiable rewards for one completion against one sample.
 *
 * Five components, each in [0, 1]:
 *   - count:      predicted vs gold entity count, piecewise linear penalty
 *   - span:       mean token F1 over Hungarian-matched pairs
 *   - type:       fraction of matched pairs with the gold type
 *   - grounding:  mean of max(0, (IoU - sigma) / (1 - sigma)) over matched pairs
 *   - entailment: fraction of matched pairs agreeing on visible vs None
 *
 * The total is their weighted sum. Completions without a parseable answer get
 * RewardConfig::format_penalty.
 */

#include <cstddef>
#include <string_view>
#include <vector>

#include "gmner/completion_parser.hpp"
#include "gmner/core.hpp"
#include "gmner/span_matching.hpp"

namespace gmner {

struct RewardConfig {
  double lambda_count = 0.2;
  double lambda_span = 0.2;
  double lambda_type = 0.2;
  double lambda_ground = 0.2;
  double lambda_entail = 0.2;
  double sigma = 0.5;
  double format_penalty = 0.0;

  /// Throws ValidationError unless weights are finite and >= 0 and 0 <= sigma < 1.
  void validate() const;
  double weight_sum() const;
};

struct RewardComponents {
  double count = 0.0;
  double span = 0.0;
  double type = 0.0;
  double ground = 0.0;
  double entail = 0.0;
};

struct RewardBreakdown {
  RewardComponents components;
  double total = 0.0;
  std::size_t k = 0;
  std::size_t p = 0;
  std::size_t q = 0;
  bool format_ok = false;
  std::vector<std::string> diagnostics;
};

/// Over-recall penalty weight, keyed by the gold count.
double overcount_weight(std::size_t gold_count);
/// Under-recall penalty weight, keyed by the predicted count.
double undercount_weight(std::size_t pred_count);

/// Entity count reward for p predicted and q gold entities.
double count_reward(std::size_t p, std::size_t q);

double span_reward(const Matching& matching, std::size_t num_preds, std::size_t num_golds);

double type_reward(const Matching& matching, const std::vector<EntityTriple>& preds,
                   const std::vector<EntityTriple>& golds);

/// Pairs with an Absent side: both Absent scores 1, exactly one Absent scores 0.
double grounding_reward(const Matching& matching, const std::vector<EntityTriple>& preds,
                        const std::vector<EntityTriple>& golds, double sigma);

double entailment_reward(const Matching& matching, const std::vector<EntityTriple>& preds,
                         const std::vector<EntityTriple>& golds);

double total_reward(const RewardComponents& c, const RewardConfig& config);

/// Rewards for already-parsed predictions. Predicted boxes are clamped to the sample's image.
RewardBreakdown score_prediction(const std::vector<EntityTriple>& predicted,
                                 const GmnerSample& sample, const RewardConfig& config);

/// Parse, match and score one completion.
RewardBreakdown score_completion(std::string_view completion, ReasoningStyle style,
                                 const GmnerSample& sample, const RewardConfig& config);

}  // namespace gmner
