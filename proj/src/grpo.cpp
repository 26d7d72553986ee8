// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gmner/core.hpp"

namespace gmner {

namespace {

bool all_equal(std::span<const double> r) {
  return std::adjacent_find(r.begin(), r.end(), std::not_equal_to<>()) == r.end();
}

}  // namespace

GroupStats group_stats(std::span<const double> rewards) {
  if (rewards.empty()) throw ValidationError("reward group is empty");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw ValidationError("reward group holds a non-finite reward");
  }
  const auto g = static_cast<double>(rewards.size());
  GroupStats s;
  s.mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / g;
  // Summation rounding can leave a tiny variance on constant groups.
  if (all_equal(rewards)) {
    s.mean = rewards.front();
    s.std = 0.0;
  } else {
    double ss = 0.0;
    for (double r : rewards) ss += (r - s.mean) * (r - s.mean);
    s.std = std::sqrt(ss / g);
  }

  std::vector<double> sorted(rewards.begin(), rewards.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  const GroupStats s = group_stats(rewards);
  std::vector<double> adv(rewards.size(), 0.0);
  if (s.std == 0.0) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - s.mean) / s.std;
  return adv;
}

void FilterThresholds::validate() const {
  if (!std::isfinite(min_std) || !std::isfinite(min_max) || !std::isfinite(median_low) ||
      !std::isfinite(median_high)) {
    throw ValidationError("filter thresholds must be finite");
  }
  if (median_low > median_high) throw ValidationError("median_low must not exceed median_high");
}

FilterDecision filter_group(std::span<const double> rewards, const FilterThresholds& t) {
  t.validate();
  FilterDecision d;
  d.stats = group_stats(rewards);
  d.std_ok = d.stats.std >= t.min_std;
  d.max_ok = d.stats.max >= t.min_max;
  d.median_ok = d.stats.median >= t.median_low && d.stats.median <= t.median_high;
  d.keep = d.std_ok && d.max_ok && d.median_ok;
  return d;
}

void ClipConfig::validate() const {
  if (!(eps_low > 0.0 && eps_high > 0.0 && 1.0 - eps_low > 0.0) || !std::isfinite(eps_high)) {
    throw ValidationError("clip bounds need 0 < eps_low < 1 and 0 < eps_high");
  }
}

double clipped_surrogate(std::span<const double> ratios, double advantage, const ClipConfig& c) {
  c.validate();
  if (ratios.empty()) throw ValidationError("clipped_surrogate: no token ratios");
  if (!std::isfinite(advantage)) throw ValidationError("clipped_surrogate: non-finite advantage");
  const double lo = 1.0 - c.eps_low;
  const double hi = 1.0 + c.eps_high;
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw ValidationError("clipped_surrogate: ratios must be positive and finite");
    }
    sum += std::min(r * advantage, std::clamp(r, lo, hi) * advantage);
  }
  return sum / static_cast<double>(ratios.size());
}

}  // namespace gmner
