#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gmner/core.hpp"

namespace gmner {

/// Whitespace tokenizer.
std::vector<std::string> tokenize(std::string_view text);

/// Length of the longest common contiguous token run.
std::size_t longest_contiguous_overlap(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b);

struct TokenF1 {
  std::size_t overlap = 0;
  std::size_t pred_tokens = 0;
  std::size_t gold_tokens = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Token-level precision/recall/F1 from the longest contiguous overlap.
/// All zero when either side has no tokens.
TokenF1 token_f1(std::string_view pred, std::string_view gold);

struct MatchedPair {
  std::size_t pred_index = 0;
  std::size_t gold_index = 0;
  TokenF1 score;
};

struct Matching {
  std::vector<MatchedPair> pairs;  // sorted by pred_index
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gold;

  std::size_t k() const { return pairs.size(); }
  double total_f1() const;
};

/// Row-to-column assignment of a square matrix; row r is assigned column result[r].
using Assignment = std::vector<std::size_t>;

/**
 * Maximum-weight perfect assignment on an n x n score matrix (row-major).
 *
 * Kuhn-Munkres on the negated scores. Among all optimal assignments (scores
 * equal within @p tie_eps) returns the one whose column sequence, read in row
 * order, is lexicographically smallest.
 */
Assignment max_weight_assignment(const std::vector<double>& scores, std::size_t n,
                                 double tie_eps = 1e-9);

/**
 * Hungarian-optimal pairing of predicted and gold entity spans by token F1.
 *
 * The rectangular F matrix is padded with zero-score dummies. Assigned pairs
 * without any token overlap are left out of the matching.
 */
Matching match_entities(const std::vector<EntityTriple>& preds,
                        const std::vector<EntityTriple>& golds);

}  // namespace gmner
