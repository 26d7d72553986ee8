// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/completion_parser.hpp"

#include <charconv>
#include <cmath>
#include <optional>

#include "prompt_assets.hpp"
#include "text_util.hpp"

namespace gmner {

using detail::trim;

std::string_view to_string(ReasoningStyle style) {
  switch (style) {
    case ReasoningStyle::Formal: return "formal";
    case ReasoningStyle::Conclusion: return "conclusion";
    case ReasoningStyle::Distill: return "distill";
  }
  return "formal";
}

ReasoningStyle parse_reasoning_style(std::string_view text) {
  const std::string key = detail::ascii_lower(trim(text));
  if (key == "formal") return ReasoningStyle::Formal;
  if (key == "conclusion") return ReasoningStyle::Conclusion;
  if (key == "distill") return ReasoningStyle::Distill;
  throw ValidationError("unknown reasoning style '" + std::string(text) +
                        "' (expected formal, conclusion or distill)");
}

namespace {

/// Contents of every complete <tag>...</tag> block, in order of appearance.
std::vector<std::string_view> tag_blocks(std::string_view text, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  std::vector<std::string_view> blocks;
  std::size_t pos = 0;
  while (true) {
    const std::size_t o = text.find(open, pos);
    if (o == std::string_view::npos) break;
    const std::size_t c = text.find(close, o + open.size());
    if (c == std::string_view::npos) break;
    // A re-opened tag before the close starts the block afresh.
    const std::size_t inner_open = text.rfind(open, c - 1);
    const std::size_t start = inner_open + open.size();
    blocks.push_back(text.substr(start, c - start));
    pos = c + close.size();
  }
  return blocks;
}

std::optional<std::string_view> last_block(std::string_view text, std::string_view tag) {
  auto blocks = tag_blocks(text, tag);
  if (blocks.empty()) return std::nullopt;
  return blocks.back();
}

struct Group {
  std::string_view text;  // including the outer parentheses
  std::size_t offset = 0;
};

/// Top-level parenthesised groups. Returns false on unbalanced parentheses.
bool top_level_groups(std::string_view s, std::vector<Group>& out, std::size_t& error_at) {
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') {
      if (depth == 0) start = i;
      ++depth;
    } else if (s[i] == ')') {
      if (depth == 0) {
        error_at = i;
        return false;
      }
      if (--depth == 0) out.push_back({s.substr(start, i - start + 1), start});
    }
  }
  if (depth != 0) {
    error_at = start;
    return false;
  }
  return true;
}

std::size_t line_of(std::string_view s, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < s.size(); ++i) {
    if (s[i] == '\n') ++line;
  }
  return line;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<BBox> parse_box_body(std::string_view body) {
  double v[4];
  int n = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = body.find(',', pos);
    const std::string_view part =
        body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (n == 4) return std::nullopt;
    auto x = parse_real(part);
    if (!x) return std::nullopt;
    v[n++] = *x;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (n != 4) return std::nullopt;
  return BBox{v[0], v[1], v[2], v[3]};
}

std::string_view strip_outer_parens(std::string_view group) {
  group = trim(group);
  if (group.size() >= 2 && group.front() == '(' && group.back() == ')') {
    return group.substr(1, group.size() - 2);
  }
  return group;
}

/// Splits "<head>, <location>" from the right, where location is None or a box.
std::optional<std::pair<std::string_view, Location>> split_location_suffix(std::string_view inner) {
  inner = trim(inner);
  if (inner.empty()) return std::nullopt;
  const char last = inner.back();
  if (last == ')' || last == ']') {
    const char open = last == ')' ? '(' : '[';
    int depth = 0;
    std::size_t i = inner.size();
    while (i-- > 0) {
      if (inner[i] == last) ++depth;
      else if (inner[i] == open && --depth == 0) break;
    }
    if (depth != 0) return std::nullopt;
    auto box = parse_box_body(inner.substr(i + 1, inner.size() - i - 2));
    if (!box) return std::nullopt;
    std::string_view head = trim(inner.substr(0, i));
    if (head.empty() || head.back() != ',') return std::nullopt;
    head.remove_suffix(1);
    return std::make_pair(head, Location{*box});
  }
  const std::size_t comma = inner.rfind(',');
  if (comma == std::string_view::npos) return std::nullopt;
  if (detail::ascii_lower(trim(inner.substr(comma + 1))) != "none") return std::nullopt;
  return std::make_pair(inner.substr(0, comma), kAbsent);
}

/// Splits "<head>, <tail>" at the last comma.
std::optional<std::pair<std::string_view, std::string_view>> split_last_comma(std::string_view s) {
  const std::size_t comma = s.rfind(',');
  if (comma == std::string_view::npos) return std::nullopt;
  auto head = trim(s.substr(0, comma));
  auto tail = trim(s.substr(comma + 1));
  if (head.empty() || tail.empty()) return std::nullopt;
  return std::make_pair(head, tail);
}

/// Groups inside a sub-tag block; falls back to one item per line when there are no parentheses.
std::vector<std::string_view> sub_tag_items(std::string_view block) {
  std::vector<Group> groups;
  std::size_t err = 0;
  std::vector<std::string_view> items;
  if (top_level_groups(block, groups, err) && !groups.empty()) {
    for (const auto& g : groups) items.push_back(strip_outer_parens(g.text));
    return items;
  }
  std::size_t pos = 0;
  while (pos <= block.size()) {
    std::size_t nl = block.find('\n', pos);
    if (nl == std::string_view::npos) nl = block.size();
    auto line = trim(block.substr(pos, nl - pos));
    if (!line.empty()) items.push_back(line);
    pos = nl + 1;
  }
  return items;
}

std::optional<int> parse_count(std::string_view s) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr == s.data() || v < 0) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  char buf[64];
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    auto res = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
    return std::string(buf, res.ptr);
  }
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void parse_sub_tags(std::string_view text, ParsedCompletion& out) {
  for (auto block : tag_blocks(text, "mner")) {
    for (auto item : sub_tag_items(block)) {
      auto split = split_last_comma(item);
      if (!split) {
        out.diagnostics.push_back("<mner>: cannot read '" + std::string(item) + "'");
        continue;
      }
      out.mner_pairs.emplace_back(normalize_entity(split->first), EntityType::parse(split->second));
    }
  }
  for (auto block : tag_blocks(text, "entailment")) {
    for (auto item : sub_tag_items(block)) {
      auto split = split_last_comma(item);
      const std::string flag = split ? detail::ascii_lower(split->second) : std::string();
      if (flag != "visible" && flag != "invisible") {
        out.diagnostics.push_back("<entailment>: cannot read '" + std::string(item) + "'");
        continue;
      }
      out.entailment_pairs.emplace_back(normalize_entity(split->first),
                                        flag == "visible" ? Visibility::Visible : Visibility::Invisible);
    }
  }
  for (auto block : tag_blocks(text, "location")) {
    for (auto item : sub_tag_items(block)) {
      auto split = split_location_suffix(item);
      if (!split || trim(split->first).empty()) {
        out.diagnostics.push_back("<location>: cannot read '" + std::string(item) + "'");
        continue;
      }
      out.location_pairs.emplace_back(normalize_entity(split->first), split->second);
    }
  }
}

void cross_check(ParsedCompletion& out) {
  if (out.entity_num && static_cast<std::size_t>(*out.entity_num) != out.answer.size()) {
    out.diagnostics.push_back("<entity_num> says " + std::to_string(*out.entity_num) +
                              " but <answer> holds " + std::to_string(out.answer.size()) +
                              " triples");
  }
  for (const auto& [entity, loc] : out.location_pairs) {
    for (const auto& t : out.answer) {
      if (normalize_entity(t.entity) != entity) continue;
      if (t.loc != loc) {
        out.diagnostics.push_back("<location> for '" + entity + "' disagrees with <answer>; using <answer>");
      }
      break;
    }
  }
}

}  // namespace

std::optional<EntityTriple> parse_triple(std::string_view text) {
  const std::string_view inner = strip_outer_parens(text);
  auto loc_split = split_location_suffix(inner);
  if (!loc_split) return std::nullopt;
  auto type_split = split_last_comma(loc_split->first);
  if (!type_split) return std::nullopt;
  EntityTriple t{normalize_entity(type_split->first), EntityType::parse(type_split->second),
                 loc_split->second};
  if (t.entity.empty()) return std::nullopt;
  return t;
}

ParsedCompletion parse_completion(std::string_view text, ReasoningStyle style) {
  ParsedCompletion out;

  if (auto process = last_block(text, "process")) out.process_text = std::string(trim(*process));

  if (auto num = last_block(text, "entity_num")) {
    out.entity_num = parse_count(*num);
    if (!out.entity_num) {
      out.diagnostics.push_back("<entity_num>: not a non-negative integer: '" +
                                std::string(trim(*num)) + "'");
    }
  }

  parse_sub_tags(text, out);

  const auto answer = last_block(text, "answer");
  if (!answer) {
    out.diagnostics.push_back("missing <answer></answer> block");
    return out;
  }

  out.format_ok = true;
  std::vector<Group> groups;
  std::size_t error_at = 0;
  if (!top_level_groups(*answer, groups, error_at)) {
    out.format_ok = false;
    out.diagnostics.push_back("<answer> line " + std::to_string(line_of(*answer, error_at)) +
                              ": unbalanced parentheses");
  }
  for (const auto& g : groups) {
    if (auto t = parse_triple(g.text)) {
      out.answer.push_back(std::move(*t));
    } else {
      out.format_ok = false;
      out.diagnostics.push_back("<answer> line " + std::to_string(line_of(*answer, g.offset)) +
                                ": not a triple: '" + std::string(g.text) + "'");
    }
  }
  if (!out.format_ok) return out;

  if (!out.process_text) out.diagnostics.push_back("missing <process></process> block");
  if (style == ReasoningStyle::Formal && !out.entity_num && out.mner_pairs.empty() &&
      out.entailment_pairs.empty() && out.location_pairs.empty()) {
    out.diagnostics.push_back("formal style: no <entity_num>, <mner>, <entailment> or <location> tags");
  }
  cross_check(out);
  return out;
}

std::string format_location(const Location& loc) {
  if (!loc) return "None";
  return "(" + format_number(loc->x1) + ", " + format_number(loc->y1) + ", " +
         format_number(loc->x2) + ", " + format_number(loc->y2) + ")";
}

std::string format_triple(const EntityTriple& triple) {
  return "(" + normalize_entity(triple.entity) + ", " + triple.etype.str() + ", " +
         format_location(triple.loc) + ")";
}

std::string serialize_answer(const std::vector<EntityTriple>& triples) {
  std::string out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (i) out += '\n';
    out += format_triple(triples[i]);
  }
  return out;
}

std::string wrap_in_answer(std::string_view body) {
  return "<answer>" + std::string(body) + "</answer>";
}

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::Instruction: return "instruction";
    case TemplateId::Formal: return "formal";
    case TemplateId::Conclusion: return "conclusion";
    case TemplateId::Distill: return "distill";
  }
  return "instruction";
}

TemplateId parse_template_id(std::string_view text) {
  const std::string key = detail::ascii_lower(trim(text));
  if (key == "instruction") return TemplateId::Instruction;
  if (key == "formal") return TemplateId::Formal;
  if (key == "conclusion") return TemplateId::Conclusion;
  if (key == "distill") return TemplateId::Distill;
  throw ValidationError("unknown prompt template '" + std::string(text) +
                        "' (expected instruction, formal, conclusion or distill)");
}

std::string_view prompt_template_version() { return detail::prompt_asset_version(); }

namespace {

std::string render_shots(const std::vector<PromptShot>& shots) {
  std::string out;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const auto& s = shots[i];
    out += "Example " + std::to_string(i + 1) + ":\n";
    out += "Text: " + s.sentence + "\n";
    out += "Image: " + s.image_placeholder + "\n";
    out += "Answer:\n" + s.answer_text + "\n\n";
  }
  return out;
}

}  // namespace

std::string render_prompt(const PromptSpec& spec) {
  const std::string_view tpl = detail::prompt_asset(spec.template_id);
  const std::string shots = render_shots(spec.shots);
  std::string out;
  out.reserve(tpl.size() + spec.sentence.size() + shots.size());
  // Single pass so substituted text is never rescanned for placeholders.
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    const std::size_t open = tpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = tpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tpl.substr(pos, open - pos));
    const std::string_view name = tpl.substr(open + 2, close - open - 2);
    if (name == "sentence") out += spec.sentence;
    else if (name == "image") out += spec.image_placeholder;
    else if (name == "shots") out += shots;
    else out.append(tpl.substr(open, close + 2 - open));
    pos = close + 2;
  }
  out.append(tpl.substr(pos));
  return out;
}

}  // namespace gmner
