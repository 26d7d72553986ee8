// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

// gmner: command-line front end over the library.
//
//   gmner parse        --in completions.jsonl --style formal --out parsed.jsonl
//   gmner score        --pred completions.jsonl --gold samples.jsonl --out rewards.jsonl
//   gmner advantage    --groups rewards.jsonl --out advantages.jsonl
//   gmner filter       --groups rewards.jsonl --out kept.jsonl --report stats.json
//   gmner eval         --pred predictions.jsonl --gold samples.jsonl --mode gmner --out report.json
//   gmner split        --in schema.jsonl --fraction 0.5 --seed 17 --out-d1 d1.jsonl --out-d2 d2.jsonl
//   gmner grec-filter  --in grec.jsonl --out filtered.jsonl
//   gmner render-prompt --template formal --sentence "..." [--shots shots.jsonl] [--out prompt.txt]
//
// Settings resolve as flag > --config file > built-in default.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmner/batch.hpp"
#include "gmner/config.hpp"
#include "gmner/dataset_io.hpp"

namespace {

using nlohmann::json;
using namespace gmner;

struct GlobalOptions {
  std::string config_path;
  int threads = 0;
  bool strict = false;
  bool lenient = false;
  std::optional<double> iou_threshold;
  std::string style = "formal";
};

CliConfig resolve_config(const GlobalOptions& g) {
  CliConfig c = g.config_path.empty() ? CliConfig{} : load_config(g.config_path);
  if (g.iou_threshold) c.iou_threshold = *g.iou_threshold;
  if (g.strict) c.strict_io = true;
  if (g.lenient) c.strict_io = false;
  c.validate();
  set_thread_count(g.threads);
  return c;
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "gmner: warning: " << w << "\n";
}

template <class T>
std::vector<T> take(Loaded<T> loaded) {
  report_warnings(loaded.warnings);
  return std::move(loaded.items);
}

std::string dump_pretty(const json& j) { return j.dump(2) + "\n"; }

// parse -------------------------------------------------------------------

int cmd_parse(const GlobalOptions& g, const std::string& in, const std::string& out) {
  const CliConfig cfg = resolve_config(g);
  const ReasoningStyle style = parse_reasoning_style(g.style);
  auto lines = take(load_jsonl(in, {cfg.strict_io}));

  std::vector<std::string> ids(lines.size());
  std::vector<std::string> texts(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& j = lines[i];
    auto id = j.find("sample_id");
    auto text = j.find("completion");
    if (id == j.end() || !id->is_string() || text == j.end() || !text->is_string()) {
      throw ValidationError(in + ": record " + std::to_string(i + 1) +
                            " needs string 'sample_id' and 'completion'");
    }
    ids[i] = id->get<std::string>();
    texts[i] = text->get<std::string>();
  }

  std::vector<ParsedCompletion> parsed(lines.size());
  const auto n = static_cast<long long>(lines.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < n; ++i) parsed[i] = parse_completion(texts[i], style);

  std::vector<json> rows;
  rows.reserve(parsed.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto& p = parsed[i];
    json row;
    row["sample_id"] = ids[i];
    row["format_ok"] = p.format_ok;
    row["triples"] = triples_to_json(p.answer);
    row["process"] = p.process_text ? json(*p.process_text) : json(nullptr);
    row["entity_num"] = p.entity_num ? json(*p.entity_num) : json(nullptr);
    row["diagnostics"] = p.diagnostics;
    rows.push_back(std::move(row));
  }
  write_jsonl(out, rows);
  return 0;
}

// score -------------------------------------------------------------------

bool looks_like_groups(const std::string& path, bool strict) {
  auto lines = load_jsonl(path, {strict}).items;
  return !lines.empty() && lines.front().contains("completions");
}

int cmd_score(const GlobalOptions& g, const std::string& pred, const std::string& gold,
              const std::string& out) {
  const CliConfig cfg = resolve_config(g);
  const ReasoningStyle style = parse_reasoning_style(g.style);
  const auto samples = take(load_samples(gold, {cfg.strict_io}));
  const SampleIndex index(samples);

  std::vector<json> rows;
  if (looks_like_groups(pred, cfg.strict_io)) {
    const auto groups = take(load_completion_groups(pred, {cfg.strict_io}));
    const auto scored = score_groups(groups, index, style, cfg.reward);
    for (std::size_t i = 0; i < groups.size(); ++i) {
      json row;
      row["sample_id"] = groups[i].sample_id;
      json rewards = json::array();
      json breakdowns = json::array();
      for (const auto& b : scored[i]) {
        rewards.push_back(b.total);
        breakdowns.push_back(breakdown_to_json(b));
      }
      row["rewards"] = std::move(rewards);
      row["breakdowns"] = std::move(breakdowns);
      rows.push_back(std::move(row));
    }
  } else {
    const auto records = take(load_predictions(pred, {cfg.strict_io}));
    const auto scored = score_records(records, index, style, cfg.reward);
    for (std::size_t i = 0; i < records.size(); ++i) {
      json row = breakdown_to_json(scored[i]);
      row["sample_id"] = records[i].sample_id;
      rows.push_back(std::move(row));
    }
  }
  write_jsonl(out, rows);
  return 0;
}

// advantage / filter ----------------------------------------------------------

int cmd_advantage(const GlobalOptions& g, const std::string& in, const std::string& out) {
  const CliConfig cfg = resolve_config(g);
  const auto groups = take(load_reward_groups(in, {cfg.strict_io}));
  const auto adv = advantages_batch(groups);
  std::vector<json> rows;
  rows.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    json row = reward_group_to_json(groups[i]);
    row["advantages"] = adv[i];
    rows.push_back(std::move(row));
  }
  write_jsonl(out, rows);
  return 0;
}

json stats_json(const GroupStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}, {"median", s.median}};
}

int cmd_filter(const GlobalOptions& g, const std::string& in, const std::string& out,
               const std::string& report) {
  const CliConfig cfg = resolve_config(g);
  const auto groups = take(load_reward_groups(in, {cfg.strict_io}));
  const auto decisions = filter_batch(groups, cfg.filter);

  std::vector<json> kept;
  json per_group = json::array();
  std::size_t failed_std = 0, failed_max = 0, failed_median = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& d = decisions[i];
    if (d.keep) kept.push_back(reward_group_to_json(groups[i]));
    failed_std += !d.std_ok;
    failed_max += !d.max_ok;
    failed_median += !d.median_ok;
    per_group.push_back({{"sample_id", groups[i].sample_id},
                         {"keep", d.keep},
                         {"std_ok", d.std_ok},
                         {"max_ok", d.max_ok},
                         {"median_ok", d.median_ok},
                         {"stats", stats_json(d.stats)}});
  }
  write_jsonl(out, kept);
  if (!report.empty()) {
    json r;
    r["total"] = groups.size();
    r["kept"] = kept.size();
    r["dropped"] = groups.size() - kept.size();
    r["failed"] = {{"std", failed_std}, {"max", failed_max}, {"median", failed_median}};
    r["thresholds"] = {{"min_std", cfg.filter.min_std},
                       {"min_max", cfg.filter.min_max},
                       {"median_low", cfg.filter.median_low},
                       {"median_high", cfg.filter.median_high}};
    r["groups"] = std::move(per_group);
    write_text_atomic(report, dump_pretty(r));
  }
  return 0;
}

// eval --------------------------------------------------------------------

int cmd_eval(const GlobalOptions& g, const std::string& pred, const std::string& gold,
             const std::string& mode, const std::string& out) {
  const CliConfig cfg = resolve_config(g);
  const TaskMode task = parse_task_mode(mode);
  const ReasoningStyle style = parse_reasoning_style(g.style);
  const auto samples = take(load_samples(gold, {cfg.strict_io}));
  const SampleIndex index(samples);
  const auto records = take(load_predictions(pred, {cfg.strict_io}));
  auto resolved = resolve_predictions(records, index, style);
  report_warnings(resolved.warnings);
  const EvalReport report = evaluate_all(resolved.predictions, samples, task, cfg.iou_threshold);
  write_text_atomic(out, dump_pretty(eval_report_to_json(report)));
  return 0;
}

// split / grec-filter -------------------------------------------------------------

int cmd_split(const GlobalOptions& g, const std::string& in, double fraction, std::uint64_t seed,
              const std::string& out_d1, const std::string& out_d2) {
  const CliConfig cfg = resolve_config(g);
  const auto records = take(load_schema_records(in, {cfg.strict_io}));
  const SchemaSplit split = split_schema_dataset(records, fraction, seed);
  write_schema_records(out_d1, split.d1);
  write_schema_records(out_d2, split.d2);
  std::cerr << "gmner: split " << records.size() << " records into " << split.d1.size() << " + "
            << split.d2.size() << "\n";
  return 0;
}

int cmd_grec_filter(const GlobalOptions& g, const std::string& in, const std::string& out) {
  const CliConfig cfg = resolve_config(g);
  const auto samples = take(load_samples(in, {cfg.strict_io}));
  const GrecFilterResult r = filter_grec_multitarget(samples);
  write_samples(out, r.kept);
  std::cerr << "gmner: kept " << r.kept.size() << ", dropped " << r.dropped
            << " multi-target samples\n";
  return 0;
}

// render-prompt -------------------------------------------------------------

PromptShot shot_from_json(const json& j) {
  PromptShot s;
  s.sentence = j.at("sentence").get<std::string>();
  s.image_placeholder = j.value("image", std::string("<image>"));
  const json& answer = j.at("answer");
  s.answer_text = answer.is_string() ? answer.get<std::string>()
                                     : serialize_answer(triples_from_json(answer));
  return s;
}

int cmd_render_prompt(const GlobalOptions& g, const std::string& tpl, const std::string& sentence,
                      const std::string& image, const std::string& shots_path,
                      const std::string& out) {
  const CliConfig cfg = resolve_config(g);
  PromptSpec spec;
  spec.template_id = parse_template_id(tpl);
  spec.sentence = sentence;
  spec.image_placeholder = image;
  if (!shots_path.empty()) {
    auto lines = take(load_jsonl(shots_path, {cfg.strict_io}));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        spec.shots.push_back(shot_from_json(lines[i]));
      } catch (const std::exception& e) {
        throw ValidationError(shots_path + ": shot " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }
  const std::string text = render_prompt(spec);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_atomic(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rewards, GRPO statistics and evaluation for grounded multimodal NER"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  auto* strict = app.add_flag("--strict", g.strict, "Reject malformed input lines");
  app.add_flag("--lenient", g.lenient, "Skip malformed lines and clamp gold boxes, with warnings")
      ->excludes(strict);
  app.add_option("--iou-threshold", g.iou_threshold, "IoU threshold for location correctness");
  app.add_option("--style", g.style, "Reasoning style: formal, conclusion or distill");

  std::string in, out, pred, gold, groups, report, mode = "gmner";
  std::string out_d1, out_d2, tpl, sentence, image = "<image>", shots;
  double fraction = 0.5;
  std::uint64_t seed = 0;

  auto* parse = app.add_subcommand("parse", "Parse tagged completions into triples");
  parse->add_option("--in", in, "Records with sample_id and completion")->required();
  parse->add_option("--out", out)->required();

  auto* score = app.add_subcommand("score", "Score predictions or completion groups");
  score->add_option("--pred", pred, "Prediction records or completion groups")->required();
  score->add_option("--gold", gold, "Gold samples")->required();
  score->add_option("--out", out)->required();

  auto* advantage = app.add_subcommand("advantage", "Group-relative advantages");
  advantage->add_option("--groups", groups, "Records with sample_id and rewards")->required();
  advantage->add_option("--out", out)->required();

  auto* filter = app.add_subcommand("filter", "Keep groups whose reward statistics pass");
  filter->add_option("--groups", groups, "Records with sample_id and rewards")->required();
  filter->add_option("--out", out)->required();
  filter->add_option("--report", report, "Per-group statistics (JSON)");

  auto* eval = app.add_subcommand("eval", "Corpus metrics for every mode plus bias metrics");
  eval->add_option("--pred", pred, "Prediction records")->required();
  eval->add_option("--gold", gold, "Gold samples")->required();
  eval->add_option("--mode", mode, "Headline mode: gmner, mner or eeg");
  eval->add_option("--out", out)->required();

  auto* split = app.add_subcommand("split", "Deterministic D1/D2 split of schema records");
  split->add_option("--in", in)->required();
  split->add_option("--fraction", fraction, "Share of sample ids assigned to D1");
  split->add_option("--seed", seed);
  split->add_option("--out-d1", out_d1)->required();
  split->add_option("--out-d2", out_d2)->required();

  auto* grec = app.add_subcommand("grec-filter", "Drop samples with two or more gold regions");
  grec->add_option("--in", in)->required();
  grec->add_option("--out", out)->required();

  auto* render = app.add_subcommand("render-prompt", "Render a prompt template");
  render->add_option("--template", tpl, "instruction, formal, conclusion or distill")->required();
  render->add_option("--sentence", sentence)->required();
  render->add_option("--image", image, "Image placeholder");
  render->add_option("--shots", shots, "Demonstrations: sentence, image, answer per line");
  render->add_option("--out", out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
    if (app.get_subcommands().empty()) throw CLI::RequiredError("a subcommand");
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*parse) return cmd_parse(g, in, out);
    if (*score) return cmd_score(g, pred, gold, out);
    if (*advantage) return cmd_advantage(g, groups, out);
    if (*filter) return cmd_filter(g, groups, out, report);
    if (*eval) return cmd_eval(g, pred, gold, mode, out);
    if (*split) return cmd_split(g, in, fraction, seed, out_d1, out_d2);
    if (*grec) return cmd_grec_filter(g, in, out);
    if (*render) return cmd_render_prompt(g, tpl, sentence, image, shots, out);
  } catch (const std::exception& e) {
    std::cerr << "gmner: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
