// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "gmner/dataset_io.hpp"

namespace gmner {

using nlohmann::json;

void CliConfig::validate() const {
  reward.validate();
  filter.validate();
  clip.validate();
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("config: iou_threshold must lie in (0, 1]");
  }
}

namespace {

using Setter = std::function<void(CliConfig&, const json&)>;

const std::map<std::string, std::map<std::string, Setter>>& sections() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"reward",
       {
           {"lambda_count", [](CliConfig& c, const json& v) { c.reward.lambda_count = v.get<double>(); }},
           {"lambda_span", [](CliConfig& c, const json& v) { c.reward.lambda_span = v.get<double>(); }},
           {"lambda_type", [](CliConfig& c, const json& v) { c.reward.lambda_type = v.get<double>(); }},
           {"lambda_ground", [](CliConfig& c, const json& v) { c.reward.lambda_ground = v.get<double>(); }},
           {"lambda_entail", [](CliConfig& c, const json& v) { c.reward.lambda_entail = v.get<double>(); }},
           {"sigma", [](CliConfig& c, const json& v) { c.reward.sigma = v.get<double>(); }},
           {"format_penalty", [](CliConfig& c, const json& v) { c.reward.format_penalty = v.get<double>(); }},
       }},
      {"filter",
       {
           {"min_std", [](CliConfig& c, const json& v) { c.filter.min_std = v.get<double>(); }},
           {"min_max", [](CliConfig& c, const json& v) { c.filter.min_max = v.get<double>(); }},
           {"median_low", [](CliConfig& c, const json& v) { c.filter.median_low = v.get<double>(); }},
           {"median_high", [](CliConfig& c, const json& v) { c.filter.median_high = v.get<double>(); }},
       }},
      {"clip",
       {
           {"eps_low", [](CliConfig& c, const json& v) { c.clip.eps_low = v.get<double>(); }},
           {"eps_high", [](CliConfig& c, const json& v) { c.clip.eps_high = v.get<double>(); }},
       }},
  };
  return table;
}

void apply_key(CliConfig& c, const std::string& section, const std::string& key, const json& v) {
  const std::string where = section.empty() ? key : section + "." + key;
  if (key == "iou_threshold" && section.empty()) {
    if (!v.is_number()) throw ValidationError("config: '" + where + "' must be a number");
    c.iou_threshold = v.get<double>();
    return;
  }
  if (key == "strict_io" && section.empty()) {
    if (!v.is_boolean()) throw ValidationError("config: '" + where + "' must be a boolean");
    c.strict_io = v.get<bool>();
    return;
  }
  for (const auto& [name, keys] : sections()) {
    if (!section.empty() && section != name) continue;
    auto it = keys.find(key);
    if (it == keys.end()) continue;
    if (!v.is_number()) throw ValidationError("config: '" + where + "' must be a number");
    it->second(c, v);
    return;
  }
  throw ValidationError("config: unknown key '" + where + "'");
}

}  // namespace

CliConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
  CliConfig c;
  for (const auto& [key, value] : j.items()) {
    if (sections().count(key)) {
      if (!value.is_object()) throw ValidationError("config: section '" + key + "' must be an object");
      for (const auto& [sub, v] : value.items()) apply_key(c, key, sub, v);
    } else {
      apply_key(c, "", key, value);
    }
  }
  c.validate();
  return c;
}

json config_to_json(const CliConfig& c) {
  json j;
  j["reward"] = {{"lambda_count", c.reward.lambda_count},   {"lambda_span", c.reward.lambda_span},
                 {"lambda_type", c.reward.lambda_type},     {"lambda_ground", c.reward.lambda_ground},
                 {"lambda_entail", c.reward.lambda_entail}, {"sigma", c.reward.sigma},
                 {"format_penalty", c.reward.format_penalty}};
  j["filter"] = {{"min_std", c.filter.min_std},
                 {"min_max", c.filter.min_max},
                 {"median_low", c.filter.median_low},
                 {"median_high", c.filter.median_high}};
  j["clip"] = {{"eps_low", c.clip.eps_low}, {"eps_high", c.clip.eps_high}};
  j["iou_threshold"] = c.iou_threshold;
  j["strict_io"] = c.strict_io;
  return j;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("config '" + path.string() + "': " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace gmner
