// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gmner {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing key '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw ValidationError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

int require_positive_int(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0 || v.get<long long>() > 1'000'000'000) {
    throw ValidationError(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<int>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ValidationError(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

Location location_from_json(const json& j) {
  if (j.is_null()) return kAbsent;
  if (!j.is_array() || j.size() != 4) {
    throw ValidationError("'bbox' must be null or an array [x1, y1, x2, y2]");
  }
  double v[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_number()) throw ValidationError("'bbox' coordinates must be numbers");
    v[i] = j[i].get<double>();
    if (!std::isfinite(v[i])) throw ValidationError("'bbox' coordinates must be finite");
  }
  return BBox{v[0], v[1], v[2], v[3]};
}

json number_json(double v) {
  if (v == std::floor(v) && std::fabs(v) < 9.0e15) return json(static_cast<long long>(v));
  return json(v);
}

template <class T, class Convert>
Loaded<T> load_converted(const std::filesystem::path& path, const LoadOptions& opts,
                         Convert&& convert) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Loaded<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      convert(std::move(j), out, lineno);
    } catch (const std::exception& e) {
      const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
      if (opts.strict) throw IoError(where + e.what());
      out.warnings.push_back(where + e.what() + " (line skipped)");
    }
  }
  return out;
}

template <class T, class FromJson>
Loaded<T> load_records(const std::filesystem::path& path, const LoadOptions& opts,
                       FromJson&& from_json) {
  return load_converted<T>(path, opts, [&](json j, Loaded<T>& out, std::size_t) {
    out.items.push_back(from_json(j));
  });
}

}  // namespace

json triple_to_json(const EntityTriple& t) {
  json j;
  j["entity"] = t.entity;
  j["type"] = t.etype.str();
  if (t.loc) {
    j["bbox"] = json::array({number_json(t.loc->x1), number_json(t.loc->y1),
                             number_json(t.loc->x2), number_json(t.loc->y2)});
  } else {
    j["bbox"] = nullptr;
  }
  return j;
}

EntityTriple triple_from_json(const json& j) {
  EntityTriple t;
  t.entity = require_string(j, "entity");
  t.etype = EntityType::parse(require_string(j, "type"));
  auto it = j.find("bbox");
  t.loc = it == j.end() ? kAbsent : location_from_json(*it);
  t.validate();
  return t;
}

json triples_to_json(const std::vector<EntityTriple>& ts) {
  json arr = json::array();
  for (const auto& t : ts) arr.push_back(triple_to_json(t));
  return arr;
}

std::vector<EntityTriple> triples_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("triple list must be an array");
  std::vector<EntityTriple> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(triple_from_json(j[i]));
    } catch (const ValidationError& e) {
      throw ValidationError("triple " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

json sample_to_json(const GmnerSample& s) {
  json j;
  j["id"] = s.id;
  j["sentence"] = s.sentence;
  j["image_ref"] = s.image_ref;
  j["image_width"] = s.image_width;
  j["image_height"] = s.image_height;
  j["gold"] = triples_to_json(s.gold);
  return j;
}

GmnerSample sample_from_json(const json& j) {
  GmnerSample s;
  s.id = require_string(j, "id");
  s.sentence = require_string(j, "sentence");
  s.image_ref = optional_string(j, "image_ref").value_or("");
  s.image_width = require_positive_int(j, "image_width");
  s.image_height = require_positive_int(j, "image_height");
  auto it = j.find("gold");
  if (it != j.end()) s.gold = triples_from_json(*it);
  return s;
}

json prediction_to_json(const PredictionRecord& r) {
  json j;
  j["sample_id"] = r.sample_id;
  if (r.completion) j["completion"] = *r.completion;
  if (r.triples) j["triples"] = triples_to_json(*r.triples);
  return j;
}

PredictionRecord prediction_from_json(const json& j) {
  PredictionRecord r;
  r.sample_id = require_string(j, "sample_id");
  r.completion = optional_string(j, "completion");
  auto it = j.find("triples");
  if (it != j.end() && !it->is_null()) r.triples = triples_from_json(*it);
  if (!r.completion && !r.triples) {
    throw ValidationError("prediction needs 'completion' or 'triples'");
  }
  return r;
}

CompletionGroup completion_group_from_json(const json& j) {
  CompletionGroup g;
  g.sample_id = require_string(j, "sample_id");
  const json& c = require(j, "completions");
  if (!c.is_array() || c.empty()) throw ValidationError("'completions' must be a non-empty array");
  for (const auto& x : c) {
    if (!x.is_string()) throw ValidationError("'completions' entries must be strings");
    g.completions.push_back(x.get<std::string>());
  }
  return g;
}

json reward_group_to_json(const RewardGroup& g) {
  json j;
  j["sample_id"] = g.sample_id;
  j["rewards"] = g.rewards;
  return j;
}

RewardGroup reward_group_from_json(const json& j) {
  RewardGroup g;
  g.sample_id = require_string(j, "sample_id");
  auto it = j.find("rewards");
  if (it == j.end()) {
    throw ValidationError("missing key 'rewards' (score completion groups first)");
  }
  if (!it->is_array() || it->empty()) throw ValidationError("'rewards' must be a non-empty array");
  for (const auto& x : *it) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      throw ValidationError("'rewards' entries must be finite numbers");
    }
    g.rewards.push_back(x.get<double>());
  }
  return g;
}

json schema_record_to_json(const SchemaRecord& r) {
  json j;
  j["sample_id"] = r.sample_id;
  j["style"] = std::string(to_string(r.style));
  j["prompt"] = r.prompt;
  j["reasoning"] = r.reasoning;
  j["answer"] = triples_to_json(r.answer);
  return j;
}

SchemaRecord schema_record_from_json(const json& j) {
  SchemaRecord r;
  r.sample_id = require_string(j, "sample_id");
  r.style = parse_reasoning_style(require_string(j, "style"));
  r.prompt = optional_string(j, "prompt").value_or("");
  r.reasoning = optional_string(j, "reasoning").value_or("");
  r.answer = triples_from_json(require(j, "answer"));
  return r;
}

Loaded<json> load_jsonl(const std::filesystem::path& path, const LoadOptions& opts) {
  return load_converted<json>(path, opts, [](json j, Loaded<json>& out, std::size_t) {
    if (!j.is_object()) throw ValidationError("expected a JSON object");
    out.items.push_back(std::move(j));
  });
}

Loaded<GmnerSample> load_samples(const std::filesystem::path& path, const LoadOptions& opts) {
  return load_converted<GmnerSample>(
      path, opts, [&](json j, Loaded<GmnerSample>& out, std::size_t lineno) {
        GmnerSample s = sample_from_json(j);
        if (!opts.strict) {
          for (std::size_t i = 0; i < s.gold.size(); ++i) {
            auto& loc = s.gold[i].loc;
            if (loc && clamp_to_image(*loc, s.image_width, s.image_height)) {
              out.warnings.push_back(path.string() + ":" + std::to_string(lineno) + ": gold[" +
                                     std::to_string(i) + "] box clamped to image bounds");
            }
          }
        }
        s.validate();
        out.items.push_back(std::move(s));
      });
}

Loaded<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                          const LoadOptions& opts) {
  return load_records<PredictionRecord>(path, opts, prediction_from_json);
}

Loaded<CompletionGroup> load_completion_groups(const std::filesystem::path& path,
                                               const LoadOptions& opts) {
  return load_records<CompletionGroup>(path, opts, completion_group_from_json);
}

Loaded<RewardGroup> load_reward_groups(const std::filesystem::path& path,
                                       const LoadOptions& opts) {
  return load_records<RewardGroup>(path, opts, reward_group_from_json);
}

Loaded<SchemaRecord> load_schema_records(const std::filesystem::path& path,
                                         const LoadOptions& opts) {
  return load_records<SchemaRecord>(path, opts, schema_record_from_json);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& lines) {
  std::string body;
  for (const auto& j : lines) {
    body += j.dump();
    body += '\n';
  }
  write_text_atomic(path, body);
}

void write_samples(const std::filesystem::path& path, const std::vector<GmnerSample>& samples) {
  std::vector<json> lines;
  lines.reserve(samples.size());
  for (const auto& s : samples) lines.push_back(sample_to_json(s));
  write_jsonl(path, lines);
}

void write_schema_records(const std::filesystem::path& path,
                          const std::vector<SchemaRecord>& records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(schema_record_to_json(r));
  write_jsonl(path, lines);
}

GrecFilterResult filter_grec_multitarget(const std::vector<GmnerSample>& samples) {
  GrecFilterResult r;
  for (const auto& s : samples) {
    std::size_t regions = 0;
    for (const auto& t : s.gold) regions += t.loc.has_value();
    if (regions >= 2) {
      ++r.dropped;
    } else {
      r.kept.push_back(s);
    }
  }
  return r;
}

namespace {

// FNV-1a and the splitmix64 finaliser: fixed, platform-independent id hashing.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SchemaSplit split_schema_dataset(const std::vector<SchemaRecord>& records, double fraction,
                                 std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("split fraction must lie in (0, 1)");
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.sample_id);

  const std::uint64_t salt = mix64(seed);
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  ranked.reserve(ids.size());
  for (const auto& id : ids) ranked.emplace_back(mix64(fnv1a(id) ^ salt), id);
  std::sort(ranked.begin(), ranked.end());

  const auto n1 = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ranked.size())));
  std::set<std::string> in_d1;
  for (std::size_t i = 0; i < n1 && i < ranked.size(); ++i) in_d1.insert(ranked[i].second);

  SchemaSplit out;
  for (const auto& r : records) (in_d1.count(r.sample_id) ? out.d1 : out.d2).push_back(r);
  return out;
}

}  // namespace gmner
