#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

/**
 * @file completion_parser.hpp
 * @brief Tagged completion parsing, answer serialization and prompt rendering.
 *
 * Completions carry their reasoning in `<process>` and the final prediction in
 * `<answer>`, one triple per line:
 *
 *     (Spurs, organization, (405, 216, 558, 324))
 *     (Premier League, organization, None)
 *
 * The formal style additionally emits `<entity_num>`, `<mner>`, `<entailment>`
 * and `<location>` tags. Only `<answer>` decides whether a completion is well
 * formed; the other tags are parsed best effort and feed diagnostics.
 */

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gmner/core.hpp"

namespace gmner {

enum class ReasoningStyle { Formal, Conclusion, Distill };

std::string_view to_string(ReasoningStyle style);
ReasoningStyle parse_reasoning_style(std::string_view text);

enum class Visibility { Visible, Invisible };

struct ParsedCompletion {
  std::optional<std::string> process_text;
  std::optional<int> entity_num;
  std::vector<std::pair<std::string, EntityType>> mner_pairs;
  std::vector<std::pair<std::string, Visibility>> entailment_pairs;
  std::vector<std::pair<std::string, Location>> location_pairs;
  std::vector<EntityTriple> answer;
  bool format_ok = false;
  std::vector<std::string> diagnostics;
};

/// Total over arbitrary text: failures show up in format_ok and diagnostics, never as exceptions.
ParsedCompletion parse_completion(std::string_view text, ReasoningStyle style);

/// Parse one "(entity, type, None | (x1, y1, x2, y2))" group. Returns nullopt on malformed input.
std::optional<EntityTriple> parse_triple(std::string_view text);

/// "(entity, type, location)" with boxes as "(x1, y1, x2, y2)"; integral coordinates print without a fraction.
std::string format_triple(const EntityTriple& triple);
std::string format_location(const Location& loc);

/// One triple per line, no trailing newline. Empty list gives "".
std::string serialize_answer(const std::vector<EntityTriple>& triples);

/// "<answer>" + body + "</answer>".
std::string wrap_in_answer(std::string_view body);

enum class TemplateId { Instruction, Formal, Conclusion, Distill };

std::string_view to_string(TemplateId id);
/// Throws ValidationError for anything other than instruction, formal, conclusion, distill.
TemplateId parse_template_id(std::string_view text);

struct PromptShot {
  std::string sentence;
  std::string image_placeholder;
  std::string answer_text;
};

struct PromptSpec {
  TemplateId template_id = TemplateId::Instruction;
  std::string sentence;
  std::string image_placeholder = "<image>";
  std::vector<PromptShot> shots;
};

/// Substitutes the sentence, image placeholder and demonstrations into the shipped template.
std::string render_prompt(const PromptSpec& spec);

/// Version tag of the shipped template set.
std::string_view prompt_template_version();

}  // namespace gmner
