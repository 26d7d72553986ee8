// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/metrics.hpp"

#include <map>
#include <set>

#include "text_util.hpp"

namespace gmner {

PRF prf_from_counts(const Counts& c) {
  PRF r;
  r.counts = c;
  r.precision = c.predicted ? static_cast<double>(c.correct) / static_cast<double>(c.predicted) : 0.0;
  r.recall = c.gold ? static_cast<double>(c.correct) / static_cast<double>(c.gold) : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

Counts sample_counts(const std::vector<EntityTriple>& preds, const GmnerSample& sample,
                     TaskMode mode, double iou_threshold) {
  const auto& golds = sample.gold;
  Counts c;
  c.predicted = preds.size();
  c.gold = golds.size();
  c.correct = max_certified_pairs(preds.size(), golds.size(), [&](std::size_t i, std::size_t j) {
    return triple_correct(preds[i], golds[j], mode, iou_threshold);
  });
  return c;
}

std::vector<const SamplePrediction*> align_predictions(
    const std::vector<SamplePrediction>& predictions, const std::vector<GmnerSample>& samples) {
  std::map<std::string, const SamplePrediction*> by_id;
  std::set<std::string> duplicate, known;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.sample_id, &p).second) duplicate.insert(p.sample_id);
  }
  std::vector<std::string> missing;
  std::vector<const SamplePrediction*> aligned;
  aligned.reserve(samples.size());
  for (const auto& s : samples) {
    if (!known.insert(s.id).second) duplicate.insert(s.id);
    auto it = by_id.find(s.id);
    if (it == by_id.end()) {
      missing.push_back(s.id);
      aligned.push_back(nullptr);
    } else {
      aligned.push_back(it->second);
    }
  }
  std::vector<std::string> unknown;
  for (const auto& [id, _] : by_id) {
    if (!known.count(id)) unknown.push_back(id);
  }
  if (missing.empty() && unknown.empty() && duplicate.empty()) return aligned;

  std::string msg = "predictions and gold samples are not aligned by id;";
  auto list = [&msg](const char* what, const auto& ids) {
    if (ids.empty()) return;
    msg += std::string(" ") + what + ":";
    for (const auto& id : ids) msg += " '" + id + "'";
    msg += ";";
  };
  list("no prediction for", missing);
  list("unknown sample id", unknown);
  list("duplicated id", duplicate);
  msg.pop_back();
  throw ValidationError(msg);
}

PRF evaluate_corpus(const std::vector<SamplePrediction>& predictions,
                    const std::vector<GmnerSample>& samples, TaskMode mode, double iou_threshold) {
  const auto aligned = align_predictions(predictions, samples);
  Counts total;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    total += sample_counts(aligned[s]->triples, samples[s], mode, iou_threshold);
  }
  return prf_from_counts(total);
}

std::size_t region_count(const GmnerSample& sample) {
  std::size_t n = 0;
  for (const auto& t : sample.gold) n += t.loc.has_value();
  return n;
}

Location predicted_region(const std::vector<EntityTriple>& preds) {
  for (const auto& t : preds) {
    if (t.loc) return t.loc;
  }
  return kAbsent;
}

VgScores vg_scores(const std::vector<SamplePrediction>& predictions,
                   const std::vector<GmnerSample>& samples, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("iou threshold must lie in (0, 1]");
  }
  const auto aligned = align_predictions(predictions, samples);
  VgScores v;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const std::size_t regions = region_count(samples[s]);
    const Location pred = predicted_region(aligned[s]->triples);
    if (regions == 0) {
      ++v.no_target_samples;
      v.no_target_correct += !pred.has_value();
    } else if (regions == 1) {
      ++v.one_target_samples;
      const Location gold = predicted_region(samples[s].gold);
      v.one_target_correct += pred.has_value() && iou_or_zero(*pred, *gold) >= iou_threshold;
    }
  }
  if (v.no_target_samples) {
    v.n_acc = static_cast<double>(v.no_target_correct) / static_cast<double>(v.no_target_samples);
  }
  if (v.one_target_samples) {
    v.precision =
        static_cast<double>(v.one_target_correct) / static_cast<double>(v.one_target_samples);
  }
  return v;
}

std::optional<double> no_target_accuracy(const std::vector<SamplePrediction>& predictions,
                                         const std::vector<GmnerSample>& samples) {
  return vg_scores(predictions, samples).n_acc;
}

std::optional<double> vg_precision(const std::vector<SamplePrediction>& predictions,
                                   const std::vector<GmnerSample>& samples, double iou_threshold) {
  return vg_scores(predictions, samples, iou_threshold).precision;
}

Counts sample_textual_bias_counts(const std::vector<EntityTriple>& preds,
                                  const GmnerSample& sample) {
  std::vector<const EntityTriple*> p, g;
  for (const auto& t : preds) {
    if (!t.loc) p.push_back(&t);
  }
  for (const auto& t : sample.gold) {
    if (!t.loc) g.push_back(&t);
  }
  Counts c;
  c.predicted = p.size();
  c.gold = g.size();
  c.correct = max_certified_pairs(p.size(), g.size(), [&](std::size_t i, std::size_t j) {
    return normalize_entity(p[i]->entity) == normalize_entity(g[j]->entity);
  });
  return c;
}

TextualBias textual_bias_prf(const std::vector<SamplePrediction>& predictions,
                             const std::vector<GmnerSample>& samples) {
  const auto aligned = align_predictions(predictions, samples);
  Counts total;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    total += sample_textual_bias_counts(aligned[s]->triples, samples[s]);
  }
  const PRF r = prf_from_counts(total);
  return {r.precision, r.recall, r.f1, total};
}

bool entity_in_sentence(std::string_view entity, std::string_view sentence) {
  const std::string e = detail::ascii_lower(detail::collapse_whitespace(entity));
  const std::string s = detail::ascii_lower(detail::collapse_whitespace(sentence));
  return s.find(e) != std::string::npos;
}

VisualBias visual_bias_stats(const std::vector<SamplePrediction>& predictions,
                             const std::vector<GmnerSample>& samples) {
  const auto aligned = align_predictions(predictions, samples);
  VisualBias v;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (const auto& t : aligned[s]->triples) {
      ++v.total_recalled;
      v.n_count += !entity_in_sentence(t.entity, samples[s].sentence);
    }
  }
  v.n_rate = v.total_recalled
                 ? static_cast<double>(v.n_count) / static_cast<double>(v.total_recalled)
                 : 0.0;
  return v;
}

}  // namespace gmner
