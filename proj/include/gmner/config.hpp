#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

// Experiment configuration shared by the CLI subcommands.
//
// One JSON document, either flat or split into sections:
//
//   {
//     "reward": {"lambda_count": 0.2, "lambda_span": 0.2, "lambda_type": 0.2,
//                "lambda_ground": 0.2, "lambda_entail": 0.2, "sigma": 0.5,
//                "format_penalty": 0.0},
//     "filter": {"min_std": 0.1, "min_max": 0.8, "median_low": 0.08, "median_high": 0.6},
//     "clip":   {"eps_low": 0.15, "eps_high": 0.25},
//     "iou_threshold": 0.5,
//     "strict_io": true
//   }
//
// Absent keys keep their defaults. Unknown keys are rejected so typos surface.

#include <filesystem>

#include <json.hpp>

#include "gmner/grpo.hpp"
#include "gmner/reward.hpp"

namespace gmner {

struct CliConfig {
  RewardConfig reward;
  FilterThresholds filter;
  ClipConfig clip;
  double iou_threshold = kDefaultIouThreshold;
  bool strict_io = true;

  void validate() const;
};

/// Throws ValidationError naming the offending key.
CliConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const CliConfig& c);

/// Reads and validates a config file; throws IoError or ValidationError.
CliConfig load_config(const std::filesystem::path& path);

}  // namespace gmner
