#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

/**
 * @file metrics.hpp
 * @brief Corpus-level GMNER / MNER / EEG scores, visual grounding metrics and
 * the modality-bias metrics.
 *
 * Counts are micro-aggregated: each sample contributes integer
 * (correct, predicted, gold) tallies that are summed before any ratio is
 * taken. Within a sample a gold triple certifies at most one prediction, via a
 * maximum one-to-one matching under the mode's correctness predicate
 * (augmenting paths, predictions and golds visited in listed order).
 */

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gmner/core.hpp"

namespace gmner {

struct SamplePrediction {
  std::string sample_id;
  std::vector<EntityTriple> triples;
};

struct Counts {
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  Counts& operator+=(const Counts& o) {
    correct += o.correct;
    predicted += o.predicted;
    gold += o.gold;
    return *this;
  }
  friend Counts operator+(Counts a, const Counts& b) { return a += b; }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Counts counts;
};

/// Ratios from counts; zero denominators give 0.
PRF prf_from_counts(const Counts& c);

/// Size of a maximum one-to-one pairing where edge(i, j) says pred i may certify gold j.
template <class Edge>
std::size_t max_certified_pairs(std::size_t num_preds, std::size_t num_golds, Edge&& edge);

/// One sample's tallies under the mode's correctness predicate.
Counts sample_counts(const std::vector<EntityTriple>& preds, const GmnerSample& sample,
                     TaskMode mode, double iou_threshold = kDefaultIouThreshold);

/**
 * Pairs predictions with samples by id, in sample order.
 *
 * Throws ValidationError naming every id that is duplicated, missing on one
 * side, or unknown.
 */
std::vector<const SamplePrediction*> align_predictions(
    const std::vector<SamplePrediction>& predictions, const std::vector<GmnerSample>& samples);

PRF evaluate_corpus(const std::vector<SamplePrediction>& predictions,
                    const std::vector<GmnerSample>& samples, TaskMode mode,
                    double iou_threshold = kDefaultIouThreshold);

/// Number of gold triples carrying a box: the sample's visual grounding target count.
std::size_t region_count(const GmnerSample& sample);

/// First predicted box, or Absent when the prediction grounds nothing.
Location predicted_region(const std::vector<EntityTriple>& preds);

struct VgScores {
  std::optional<double> n_acc;      // over no-target samples; nullopt when there are none
  std::optional<double> precision;  // over one-target samples; nullopt when there are none
  std::size_t no_target_samples = 0;
  std::size_t no_target_correct = 0;
  std::size_t one_target_samples = 0;
  std::size_t one_target_correct = 0;
};

std::optional<double> no_target_accuracy(const std::vector<SamplePrediction>& predictions,
                                         const std::vector<GmnerSample>& samples);

std::optional<double> vg_precision(const std::vector<SamplePrediction>& predictions,
                                   const std::vector<GmnerSample>& samples,
                                   double iou_threshold = kDefaultIouThreshold);

VgScores vg_scores(const std::vector<SamplePrediction>& predictions,
                   const std::vector<GmnerSample>& samples,
                   double iou_threshold = kDefaultIouThreshold);

/// Textual bias: precision/recall/F1 restricted to triples located None.
struct TextualBias {
  double n_pre = 0.0;
  double n_rec = 0.0;
  double n_f1 = 0.0;
  Counts counts;
};

/// None-located triples of one sample: correct needs the same entity and both locations None.
Counts sample_textual_bias_counts(const std::vector<EntityTriple>& preds, const GmnerSample& sample);

TextualBias textual_bias_prf(const std::vector<SamplePrediction>& predictions,
                             const std::vector<GmnerSample>& samples);

/// Visual bias: predicted entities whose text does not occur in the sentence.
struct VisualBias {
  std::size_t n_count = 0;
  std::size_t total_recalled = 0;
  double n_rate = 0.0;
};

/// Case-insensitive substring test after collapsing whitespace on both sides.
bool entity_in_sentence(std::string_view entity, std::string_view sentence);

VisualBias visual_bias_stats(const std::vector<SamplePrediction>& predictions,
                             const std::vector<GmnerSample>& samples);

// ---------------------------------------------------------------------------

template <class Edge>
std::size_t max_certified_pairs(std::size_t num_preds, std::size_t num_golds, Edge&& edge) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> gold_owner(num_golds, none);
  std::vector<char> seen;
  // Kuhn's augmenting paths; the first listed free gold wins when there is a choice.
  auto augment = [&](auto&& self, std::size_t i) -> bool {
    for (std::size_t j = 0; j < num_golds; ++j) {
      if (seen[j] || !edge(i, j)) continue;
      seen[j] = 1;
      if (gold_owner[j] == none || self(self, gold_owner[j])) {
        gold_owner[j] = i;
        return true;
      }
    }
    return false;
  };
  std::size_t matched = 0;
  for (std::size_t i = 0; i < num_preds; ++i) {
    seen.assign(num_golds, 0);
    if (augment(augment, i)) ++matched;
  }
  return matched;
}

}  // namespace gmner
