// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/batch.hpp"

#include <exception>
#include <mutex>

#include <omp.h>

namespace gmner {

using nlohmann::json;

SampleIndex::SampleIndex(const std::vector<GmnerSample>& samples) {
  for (const auto& s : samples) {
    if (!by_id_.emplace(s.id, &s).second) {
      throw ValidationError("duplicate sample id '" + s.id + "'");
    }
  }
}

const GmnerSample& SampleIndex::at(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw ValidationError("unknown sample id '" + id + "'");
  return *it->second;
}

const PRF& EvalReport::primary() const {
  switch (mode) {
    case TaskMode::GMNER: return gmner;
    case TaskMode::MNER: return mner;
    case TaskMode::EEG: return eeg;
  }
  return gmner;
}

void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

namespace {

// Runs body(i) for i in [0, n). Exceptions cannot cross an OpenMP region, so
// the first one is captured and rethrown after the loop.
template <bool Parallel, class Body>
void for_each_index(std::size_t n, Body&& body) {
  if constexpr (!Parallel) {
    for (std::size_t i = 0; i < n; ++i) body(i);
  } else {
    std::exception_ptr error;
    std::once_flag once;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        std::call_once(once, [&] { error = std::current_exception(); });
      }
    }
    if (error) std::rethrow_exception(error);
  }
}

void check_ids(const std::vector<PredictionRecord>& records, const SampleIndex& samples) {
  for (const auto& r : records) samples.at(r.sample_id);
}

struct ResolvedOne {
  SamplePrediction prediction;
  std::vector<std::string> warnings;
};

ResolvedOne resolve_one(const PredictionRecord& r, const GmnerSample& sample, ReasoningStyle style) {
  ResolvedOne out;
  out.prediction.sample_id = r.sample_id;
  if (r.triples) {
    out.prediction.triples = *r.triples;
  } else {
    ParsedCompletion parsed = parse_completion(*r.completion, style);
    if (!parsed.format_ok) {
      for (auto& d : parsed.diagnostics) out.warnings.push_back(r.sample_id + ": " + d);
    }
    out.prediction.triples = std::move(parsed.answer);
  }
  for (std::size_t i = 0; i < out.prediction.triples.size(); ++i) {
    auto& loc = out.prediction.triples[i].loc;
    if (loc && clamp_to_image(*loc, sample.image_width, sample.image_height)) {
      out.warnings.push_back(r.sample_id + ": predicted box " + std::to_string(i) +
                             " clamped to image bounds");
    }
  }
  return out;
}

template <bool Parallel>
ResolvedPredictions resolve_impl(const std::vector<PredictionRecord>& records,
                                 const SampleIndex& samples, ReasoningStyle style) {
  check_ids(records, samples);
  std::vector<ResolvedOne> slots(records.size());
  for_each_index<Parallel>(records.size(), [&](std::size_t i) {
    slots[i] = resolve_one(records[i], samples.at(records[i].sample_id), style);
  });
  ResolvedPredictions out;
  out.predictions.reserve(records.size());
  for (auto& s : slots) {
    out.predictions.push_back(std::move(s.prediction));
    for (auto& w : s.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

RewardBreakdown score_record(const PredictionRecord& r, const GmnerSample& sample,
                             ReasoningStyle style, const RewardConfig& config) {
  if (r.triples) return score_prediction(*r.triples, sample, config);
  return score_completion(*r.completion, style, sample, config);
}

template <bool Parallel>
std::vector<RewardBreakdown> score_records_impl(const std::vector<PredictionRecord>& records,
                                                const SampleIndex& samples, ReasoningStyle style,
                                                const RewardConfig& config) {
  config.validate();
  check_ids(records, samples);
  std::vector<RewardBreakdown> out(records.size());
  for_each_index<Parallel>(records.size(), [&](std::size_t i) {
    out[i] = score_record(records[i], samples.at(records[i].sample_id), style, config);
  });
  return out;
}

template <bool Parallel>
std::vector<std::vector<RewardBreakdown>> score_groups_impl(
    const std::vector<CompletionGroup>& groups, const SampleIndex& samples, ReasoningStyle style,
    const RewardConfig& config) {
  config.validate();
  std::vector<std::pair<std::size_t, std::size_t>> flat;
  std::vector<std::vector<RewardBreakdown>> out(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    samples.at(groups[g].sample_id);
    out[g].resize(groups[g].completions.size());
    for (std::size_t c = 0; c < groups[g].completions.size(); ++c) flat.emplace_back(g, c);
  }
  for_each_index<Parallel>(flat.size(), [&](std::size_t i) {
    const auto [g, c] = flat[i];
    out[g][c] = score_completion(groups[g].completions[c], style,
                                 samples.at(groups[g].sample_id), config);
  });
  return out;
}

template <bool Parallel>
std::vector<std::vector<double>> advantages_impl(const std::vector<RewardGroup>& groups) {
  std::vector<std::vector<double>> out(groups.size());
  for_each_index<Parallel>(groups.size(),
                           [&](std::size_t i) { out[i] = group_advantages(groups[i].rewards); });
  return out;
}

template <bool Parallel>
std::vector<FilterDecision> filter_impl(const std::vector<RewardGroup>& groups,
                                        const FilterThresholds& thresholds) {
  thresholds.validate();
  std::vector<FilterDecision> out(groups.size());
  for_each_index<Parallel>(groups.size(), [&](std::size_t i) {
    out[i] = filter_group(groups[i].rewards, thresholds);
  });
  return out;
}

struct SampleTally {
  Counts gmner, mner, eeg, textual;
  bool no_target = false, one_target = false, vg_correct = false;
  std::size_t recalled = 0, absent_from_text = 0;
};

SampleTally tally_sample(const std::vector<EntityTriple>& preds, const GmnerSample& sample,
                         double iou_threshold) {
  SampleTally t;
  t.gmner = sample_counts(preds, sample, TaskMode::GMNER, iou_threshold);
  t.mner = sample_counts(preds, sample, TaskMode::MNER, iou_threshold);
  t.eeg = sample_counts(preds, sample, TaskMode::EEG, iou_threshold);
  t.textual = sample_textual_bias_counts(preds, sample);

  const std::size_t regions = region_count(sample);
  const Location pred = predicted_region(preds);
  if (regions == 0) {
    t.no_target = true;
    t.vg_correct = !pred.has_value();
  } else if (regions == 1) {
    t.one_target = true;
    const Location gold = predicted_region(sample.gold);
    t.vg_correct = pred.has_value() && iou_or_zero(*pred, *gold) >= iou_threshold;
  }

  t.recalled = preds.size();
  for (const auto& p : preds) t.absent_from_text += !entity_in_sentence(p.entity, sample.sentence);
  return t;
}

template <bool Parallel>
EvalReport evaluate_impl(const std::vector<SamplePrediction>& predictions,
                         const std::vector<GmnerSample>& samples, TaskMode mode,
                         double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("iou threshold must lie in (0, 1]");
  }
  const auto aligned = align_predictions(predictions, samples);
  std::vector<SampleTally> tallies(samples.size());
  for_each_index<Parallel>(samples.size(), [&](std::size_t s) {
    tallies[s] = tally_sample(aligned[s]->triples, samples[s], iou_threshold);
  });

  EvalReport r;
  r.mode = mode;
  r.iou_threshold = iou_threshold;
  r.samples = samples.size();
  Counts g, m, e, tx;
  for (const auto& t : tallies) {
    g += t.gmner;
    m += t.mner;
    e += t.eeg;
    tx += t.textual;
    if (t.no_target) {
      ++r.vg.no_target_samples;
      r.vg.no_target_correct += t.vg_correct;
    }
    if (t.one_target) {
      ++r.vg.one_target_samples;
      r.vg.one_target_correct += t.vg_correct;
    }
    r.visual.total_recalled += t.recalled;
    r.visual.n_count += t.absent_from_text;
  }
  r.gmner = prf_from_counts(g);
  r.mner = prf_from_counts(m);
  r.eeg = prf_from_counts(e);
  const PRF tp = prf_from_counts(tx);
  r.textual = {tp.precision, tp.recall, tp.f1, tx};
  if (r.vg.no_target_samples) {
    r.vg.n_acc = static_cast<double>(r.vg.no_target_correct) /
                 static_cast<double>(r.vg.no_target_samples);
  }
  if (r.vg.one_target_samples) {
    r.vg.precision = static_cast<double>(r.vg.one_target_correct) /
                     static_cast<double>(r.vg.one_target_samples);
  }
  r.visual.n_rate = r.visual.total_recalled ? static_cast<double>(r.visual.n_count) /
                                                  static_cast<double>(r.visual.total_recalled)
                                            : 0.0;
  return r;
}

json prf_to_json(const PRF& p) {
  return {{"precision", p.precision}, {"recall", p.recall},       {"f1", p.f1},
          {"correct", p.counts.correct}, {"predicted", p.counts.predicted}, {"gold", p.counts.gold}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json eval_report_to_json(const EvalReport& r) {
  json j;
  j["mode"] = std::string(to_string(r.mode));
  j["iou_threshold"] = r.iou_threshold;
  j["samples"] = r.samples;
  j["primary"] = prf_to_json(r.primary());
  j["gmner"] = prf_to_json(r.gmner);
  j["mner"] = prf_to_json(r.mner);
  j["eeg"] = prf_to_json(r.eeg);
  j["vg"] = {{"n_acc", optional_number(r.vg.n_acc)},
             {"precision", optional_number(r.vg.precision)},
             {"no_target_samples", r.vg.no_target_samples},
             {"no_target_correct", r.vg.no_target_correct},
             {"one_target_samples", r.vg.one_target_samples},
             {"one_target_correct", r.vg.one_target_correct}};
  j["bias"] = {{"n_pre", r.textual.n_pre},
               {"n_rec", r.textual.n_rec},
               {"n_f1", r.textual.n_f1},
               {"n_correct", r.textual.counts.correct},
               {"n_predict", r.textual.counts.predicted},
               {"n_gold", r.textual.counts.gold},
               {"n_count", r.visual.n_count},
               {"n_rate", r.visual.n_rate},
               {"total_recalled", r.visual.total_recalled}};
  return j;
}

json breakdown_to_json(const RewardBreakdown& b) {
  json j;
  j["format_ok"] = b.format_ok;
  j["total"] = b.total;
  j["components"] = {{"count", b.components.count},
                     {"span", b.components.span},
                     {"type", b.components.type},
                     {"ground", b.components.ground},
                     {"entail", b.components.entail}};
  j["k"] = b.k;
  j["p"] = b.p;
  j["q"] = b.q;
  j["diagnostics"] = b.diagnostics;
  return j;
}

ResolvedPredictions resolve_predictions(const std::vector<PredictionRecord>& records,
                                        const SampleIndex& samples, ReasoningStyle style) {
  return resolve_impl<true>(records, samples, style);
}

std::vector<RewardBreakdown> score_records(const std::vector<PredictionRecord>& records,
                                           const SampleIndex& samples, ReasoningStyle style,
                                           const RewardConfig& config) {
  return score_records_impl<true>(records, samples, style, config);
}

std::vector<std::vector<RewardBreakdown>> score_groups(const std::vector<CompletionGroup>& groups,
                                                       const SampleIndex& samples,
                                                       ReasoningStyle style,
                                                       const RewardConfig& config) {
  return score_groups_impl<true>(groups, samples, style, config);
}

std::vector<std::vector<double>> advantages_batch(const std::vector<RewardGroup>& groups) {
  return advantages_impl<true>(groups);
}

std::vector<FilterDecision> filter_batch(const std::vector<RewardGroup>& groups,
                                         const FilterThresholds& thresholds) {
  return filter_impl<true>(groups, thresholds);
}

EvalReport evaluate_all(const std::vector<SamplePrediction>& predictions,
                        const std::vector<GmnerSample>& samples, TaskMode mode,
                        double iou_threshold) {
  return evaluate_impl<true>(predictions, samples, mode, iou_threshold);
}

namespace serial {

ResolvedPredictions resolve_predictions(const std::vector<PredictionRecord>& records,
                                        const SampleIndex& samples, ReasoningStyle style) {
  return resolve_impl<false>(records, samples, style);
}

std::vector<RewardBreakdown> score_records(const std::vector<PredictionRecord>& records,
                                           const SampleIndex& samples, ReasoningStyle style,
                                           const RewardConfig& config) {
  return score_records_impl<false>(records, samples, style, config);
}

std::vector<std::vector<RewardBreakdown>> score_groups(const std::vector<CompletionGroup>& groups,
                                                       const SampleIndex& samples,
                                                       ReasoningStyle style,
                                                       const RewardConfig& config) {
  return score_groups_impl<false>(groups, samples, style, config);
}

std::vector<std::vector<double>> advantages_batch(const std::vector<RewardGroup>& groups) {
  return advantages_impl<false>(groups);
}

std::vector<FilterDecision> filter_batch(const std::vector<RewardGroup>& groups,
                                         const FilterThresholds& thresholds) {
  return filter_impl<false>(groups, thresholds);
}

EvalReport evaluate_all(const std::vector<SamplePrediction>& predictions,
                        const std::vector<GmnerSample>& samples, TaskMode mode,
                        double iou_threshold) {
  return evaluate_impl<false>(predictions, samples, mode, iou_threshold);
}

}  // namespace serial

}  // namespace gmner
