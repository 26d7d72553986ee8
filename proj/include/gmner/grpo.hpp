#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

// Group-relative advantages, reward-statistics filtering of sampled groups,
// and the clipped surrogate objective evaluated on supplied token ratios.

#include <span>
#include <vector>

namespace gmner {

struct GroupStats {
  double mean = 0.0;
  double std = 0.0;  // population (divide by G)
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

/// Throws std::invalid_argument for an empty group or non-finite rewards.
GroupStats group_stats(std::span<const double> rewards);

/// (r_i - mean) / std, or all zeros when every reward is equal.
std::vector<double> group_advantages(std::span<const double> rewards);

struct FilterThresholds {
  double min_std = 0.1;
  double min_max = 0.8;
  double median_low = 0.08;
  double median_high = 0.6;

  void validate() const;
};

struct FilterDecision {
  bool keep = false;
  bool std_ok = false;
  bool max_ok = false;
  bool median_ok = false;
  GroupStats stats;
};

/// Keep iff std >= min_std, max >= min_max and median in [median_low, median_high].
FilterDecision filter_group(std::span<const double> rewards, const FilterThresholds& t);

struct ClipConfig {
  double eps_low = 0.15;
  double eps_high = 0.25;

  void validate() const;
};

/// Length-normalised sum of min(ratio * A, clip(ratio, 1 - eps_low, 1 + eps_high) * A).
double clipped_surrogate(std::span<const double> ratios, double advantage, const ClipConfig& c);

}  // namespace gmner
