#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

/**
 * @file dataset_io.hpp
 * @brief JSONL ingestion and emission for samples, predictions, completion
 * groups, reward groups and reasoning-schema records.
 *
 * Every file is UTF-8 with one JSON object per line; blank lines are skipped.
 * Triples are encoded as
 *
 *     {"entity": "Spurs", "type": "organization", "bbox": [405, 216, 558, 324]}
 *
 * with `"bbox": null` for an ungrounded entity. A sample line is
 *
 *     {"id": ..., "sentence": ..., "image_ref": ..., "image_width": W,
 *      "image_height": H, "gold": [triple, ...]}
 *
 * In strict mode the first bad line aborts with an IoError naming
 * `path:line`; in lenient mode it is skipped and reported as a warning.
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmner/completion_parser.hpp"
#include "gmner/core.hpp"

namespace gmner {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadOptions {
  bool strict = true;
};

template <class T>
struct Loaded {
  std::vector<T> items;
  std::vector<std::string> warnings;
};

struct PredictionRecord {
  std::string sample_id;
  std::optional<std::string> completion;
  std::optional<std::vector<EntityTriple>> triples;
};

struct CompletionGroup {
  std::string sample_id;
  std::vector<std::string> completions;
};

struct RewardGroup {
  std::string sample_id;
  std::vector<double> rewards;
};

struct SchemaRecord {
  std::string sample_id;
  ReasoningStyle style = ReasoningStyle::Formal;
  std::string prompt;
  std::string reasoning;
  std::vector<EntityTriple> answer;

  friend bool operator==(const SchemaRecord&, const SchemaRecord&) = default;
};

// JSON mapping. The *_from_json functions throw ValidationError on schema violations.
nlohmann::json triple_to_json(const EntityTriple& t);
EntityTriple triple_from_json(const nlohmann::json& j);
nlohmann::json triples_to_json(const std::vector<EntityTriple>& ts);
std::vector<EntityTriple> triples_from_json(const nlohmann::json& j);

nlohmann::json sample_to_json(const GmnerSample& s);
/// Parses without the bounds check; call GmnerSample::validate() afterwards.
GmnerSample sample_from_json(const nlohmann::json& j);

nlohmann::json prediction_to_json(const PredictionRecord& r);
PredictionRecord prediction_from_json(const nlohmann::json& j);

CompletionGroup completion_group_from_json(const nlohmann::json& j);
nlohmann::json reward_group_to_json(const RewardGroup& g);
RewardGroup reward_group_from_json(const nlohmann::json& j);

nlohmann::json schema_record_to_json(const SchemaRecord& r);
SchemaRecord schema_record_from_json(const nlohmann::json& j);

/// Raw JSONL lines as parsed objects.
Loaded<nlohmann::json> load_jsonl(const std::filesystem::path& path, const LoadOptions& opts = {});

/**
 * Samples with their invariants checked. A gold box overshooting the image is
 * an error in strict mode and is clamped with a warning in lenient mode.
 */
Loaded<GmnerSample> load_samples(const std::filesystem::path& path, const LoadOptions& opts = {});
Loaded<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                          const LoadOptions& opts = {});
Loaded<CompletionGroup> load_completion_groups(const std::filesystem::path& path,
                                               const LoadOptions& opts = {});
Loaded<RewardGroup> load_reward_groups(const std::filesystem::path& path,
                                       const LoadOptions& opts = {});
Loaded<SchemaRecord> load_schema_records(const std::filesystem::path& path,
                                         const LoadOptions& opts = {});

/// Writes through a temporary sibling file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines);
void write_samples(const std::filesystem::path& path, const std::vector<GmnerSample>& samples);
void write_schema_records(const std::filesystem::path& path,
                          const std::vector<SchemaRecord>& records);

struct GrecFilterResult {
  std::vector<GmnerSample> kept;
  std::size_t dropped = 0;
};

/// Drops samples whose expression maps to two or more gold regions.
GrecFilterResult filter_grec_multitarget(const std::vector<GmnerSample>& samples);

struct SchemaSplit {
  std::vector<SchemaRecord> d1;
  std::vector<SchemaRecord> d2;
};

/**
 * Seeded partition by sample id.
 *
 * Distinct ids are ranked by a seeded 64-bit hash and the first
 * round(fraction * ids) go to d1, so every record of one sample lands on the
 * same side and the result does not depend on record order. Records keep
 * their input order within each side.
 */
SchemaSplit split_schema_dataset(const std::vector<SchemaRecord>& records, double fraction,
                                 std::uint64_t seed);

}  // namespace gmner
