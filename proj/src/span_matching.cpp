// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/span_matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "text_util.hpp"

namespace gmner {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && detail::is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !detail::is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::size_t longest_contiguous_overlap(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  // run[j] = length of the common run ending at a[i-1], b[j-1]
  std::vector<std::size_t> run(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = b.size(); j >= 1; --j) {
      run[j] = a[i - 1] == b[j - 1] ? run[j - 1] + 1 : 0;
      best = std::max(best, run[j]);
    }
  }
  return best;
}

namespace {

TokenF1 token_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  TokenF1 s;
  s.pred_tokens = pred.size();
  s.gold_tokens = gold.size();
  if (pred.empty() || gold.empty()) return s;
  s.overlap = longest_contiguous_overlap(pred, gold);
  if (s.overlap == 0) return s;
  s.precision = static_cast<double>(s.overlap) / static_cast<double>(s.pred_tokens);
  s.recall = static_cast<double>(s.overlap) / static_cast<double>(s.gold_tokens);
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace

TokenF1 token_f1(std::string_view pred, std::string_view gold) {
  return token_f1(tokenize(pred), tokenize(gold));
}

double Matching::total_f1() const {
  double total = 0.0;
  for (const auto& p : pairs) total += p.score.f1;
  return total;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

class TieBreaker {
 public:
  TieBreaker(const std::vector<double>& cost, std::size_t n, const std::vector<double>& u,
             const std::vector<double>& v, double eps, Assignment& row_to_col)
      : cost_(cost), n_(n), u_(u), v_(v), eps_(eps), row_to_col_(row_to_col),
        col_to_row_(n), locked_row_(n, false), locked_col_(n, false) {
    for (std::size_t r = 0; r < n; ++r) col_to_row_[row_to_col_[r]] = r;
  }

  // Fix rows in order, each to the smallest tight column that still admits a
  // perfect matching of tight edges over the unfixed rows and columns.
  void run() {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (locked_col_[j] || !tight(i, j)) continue;
        if (j == row_to_col_[i] || reroute(i, j)) {
          locked_row_[i] = true;
          locked_col_[j] = true;
          break;
        }
      }
    }
  }

 private:
  bool tight(std::size_t r, std::size_t c) const {
    return cost_[r * n_ + c] - u_[r + 1] - v_[c + 1] <= eps_;
  }

  bool reroute(std::size_t i, std::size_t j) {
    const std::size_t owner = col_to_row_[j];
    const std::size_t target = row_to_col_[i];
    visited_.assign(n_, false);
    visited_[j] = true;
    if (!find_path(owner, target)) return false;
    row_to_col_[i] = j;
    col_to_row_[j] = i;
    return true;
  }

  // Alternating path from row r to the freed column target; rewires on success.
  bool find_path(std::size_t r, std::size_t target) {
    for (std::size_t c = 0; c < n_; ++c) {
      if (visited_[c] || locked_col_[c] || !tight(r, c)) continue;
      visited_[c] = true;
      if (c == target || find_path(col_to_row_[c], target)) {
        row_to_col_[r] = c;
        col_to_row_[c] = r;
        return true;
      }
    }
    return false;
  }

  const std::vector<double>& cost_;
  std::size_t n_;
  const std::vector<double>& u_;
  const std::vector<double>& v_;
  double eps_;
  Assignment& row_to_col_;
  std::vector<std::size_t> col_to_row_;
  std::vector<bool> locked_row_;
  std::vector<bool> locked_col_;
  std::vector<bool> visited_;
};

}  // namespace

Assignment max_weight_assignment(const std::vector<double>& scores, std::size_t n, double tie_eps) {
  if (scores.size() != n * n) {
    throw ValidationError("score matrix has " + std::to_string(scores.size()) + " cells, expected " +
                          std::to_string(n * n));
  }
  for (double x : scores) {
    if (!std::isfinite(x)) throw ValidationError("score matrix contains a non-finite value");
  }
  if (n == 0) return {};
  std::vector<double> cost(n * n);
  for (std::size_t k = 0; k < n * n; ++k) cost[k] = -scores[k];

  // Shortest augmenting path Hungarian with 1-based potentials; col_owner[0] is scratch.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    col_owner[0] = row;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = col_owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      col_owner[j0] = col_owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment row_to_col(n, kNone);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[col_owner[j] - 1] = j - 1;

  TieBreaker(cost, n, u, v, tie_eps, row_to_col).run();
  return row_to_col;
}

Matching match_entities(const std::vector<EntityTriple>& preds,
                        const std::vector<EntityTriple>& golds) {
  const std::size_t np = preds.size();
  const std::size_t ng = golds.size();
  Matching m;
  const std::size_t n = std::max(np, ng);
  if (np == 0 || ng == 0) {
    for (std::size_t i = 0; i < np; ++i) m.unmatched_pred.push_back(i);
    for (std::size_t j = 0; j < ng; ++j) m.unmatched_gold.push_back(j);
    return m;
  }

  std::vector<std::vector<std::string>> pred_tokens(np), gold_tokens(ng);
  for (std::size_t i = 0; i < np; ++i) pred_tokens[i] = tokenize(preds[i].entity);
  for (std::size_t j = 0; j < ng; ++j) gold_tokens[j] = tokenize(golds[j].entity);

  std::vector<TokenF1> cells(np * ng);
  const long long total = static_cast<long long>(np * ng);
#pragma omp parallel for schedule(static) if (total >= 4096)
  for (long long k = 0; k < total; ++k) {
    const auto i = static_cast<std::size_t>(k) / ng;
    const auto j = static_cast<std::size_t>(k) % ng;
    cells[static_cast<std::size_t>(k)] = token_f1(pred_tokens[i], gold_tokens[j]);
  }

  std::vector<double> scores(n * n, 0.0);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < ng; ++j) scores[i * n + j] = cells[i * ng + j].f1;
  }

  const Assignment a = max_weight_assignment(scores, n);
  std::vector<bool> gold_used(ng, false);
  for (std::size_t i = 0; i < np; ++i) {
    const std::size_t j = a[i];
    if (j < ng && cells[i * ng + j].overlap > 0) {
      m.pairs.push_back({i, j, cells[i * ng + j]});
      gold_used[j] = true;
    } else {
      m.unmatched_pred.push_back(i);
    }
  }
  for (std::size_t j = 0; j < ng; ++j) {
    if (!gold_used[j]) m.unmatched_gold.push_back(j);
  }
  return m;
}

}  // namespace gmner
