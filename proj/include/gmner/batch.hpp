#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

/**
 * @file batch.hpp
 * @brief Record-level kernels over whole files.
 *
 * Each kernel exists twice with the same signature: the OpenMP version in
 * namespace gmner and a plain loop in gmner::serial. Records are independent,
 * every output slot is written by exactly one iteration, and aggregation folds
 * integer counts in input order, so both versions return identical results at
 * any thread count. The serial versions are the reference the tests and the
 * benchmark compare against.
 */

#include <string>
#include <unordered_map>
#include <vector>

#include "gmner/completion_parser.hpp"
#include "gmner/dataset_io.hpp"
#include "gmner/grpo.hpp"
#include "gmner/metrics.hpp"
#include "gmner/reward.hpp"

namespace gmner {

/// Non-owning id -> sample lookup. The sample vector must outlive the index.
class SampleIndex {
 public:
  explicit SampleIndex(const std::vector<GmnerSample>& samples);
  /// Throws ValidationError for an unknown id.
  const GmnerSample& at(const std::string& id) const;
  bool contains(const std::string& id) const { return by_id_.count(id) != 0; }

 private:
  std::unordered_map<std::string, const GmnerSample*> by_id_;
};

/// Every metric family over one corpus.
struct EvalReport {
  TaskMode mode = TaskMode::GMNER;
  double iou_threshold = kDefaultIouThreshold;
  PRF gmner;
  PRF mner;
  PRF eeg;
  VgScores vg;
  TextualBias textual;
  VisualBias visual;
  std::size_t samples = 0;

  const PRF& primary() const;
};

nlohmann::json eval_report_to_json(const EvalReport& r);
nlohmann::json breakdown_to_json(const RewardBreakdown& b);

/// Resolved predictions plus ingestion warnings (parse diagnostics, clamped boxes).
struct ResolvedPredictions {
  std::vector<SamplePrediction> predictions;
  std::vector<std::string> warnings;
};

/// Set the OpenMP team size used by the kernels; n <= 0 leaves the runtime default.
void set_thread_count(int n);
int thread_count();

/// Parse completions where no triples were given; clamp boxes to the sample's image.
ResolvedPredictions resolve_predictions(const std::vector<PredictionRecord>& records,
                                        const SampleIndex& samples, ReasoningStyle style);

std::vector<RewardBreakdown> score_records(const std::vector<PredictionRecord>& records,
                                           const SampleIndex& samples, ReasoningStyle style,
                                           const RewardConfig& config);

std::vector<std::vector<RewardBreakdown>> score_groups(const std::vector<CompletionGroup>& groups,
                                                       const SampleIndex& samples,
                                                       ReasoningStyle style,
                                                       const RewardConfig& config);

std::vector<std::vector<double>> advantages_batch(const std::vector<RewardGroup>& groups);

std::vector<FilterDecision> filter_batch(const std::vector<RewardGroup>& groups,
                                         const FilterThresholds& thresholds);

EvalReport evaluate_all(const std::vector<SamplePrediction>& predictions,
                        const std::vector<GmnerSample>& samples, TaskMode mode,
                        double iou_threshold = kDefaultIouThreshold);

namespace serial {

ResolvedPredictions resolve_predictions(const std::vector<PredictionRecord>& records,
                                        const SampleIndex& samples, ReasoningStyle style);

std::vector<RewardBreakdown> score_records(const std::vector<PredictionRecord>& records,
                                           const SampleIndex& samples, ReasoningStyle style,
                                           const RewardConfig& config);

std::vector<std::vector<RewardBreakdown>> score_groups(const std::vector<CompletionGroup>& groups,
                                                       const SampleIndex& samples,
                                                       ReasoningStyle style,
                                                       const RewardConfig& config);

std::vector<std::vector<double>> advantages_batch(const std::vector<RewardGroup>& groups);

std::vector<FilterDecision> filter_batch(const std::vector<RewardGroup>& groups,
                                         const FilterThresholds& thresholds);

EvalReport evaluate_all(const std::vector<SamplePrediction>& predictions,
                        const std::vector<GmnerSample>& samples, TaskMode mode,
                        double iou_threshold = kDefaultIouThreshold);

}  // namespace serial

}  // namespace gmner
