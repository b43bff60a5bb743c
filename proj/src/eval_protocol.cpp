#include "latentpara/eval_protocol.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "latentpara/protocol.hpp"

namespace latentpara {

void EvalConfig::validate() const {
  if (!(cosine_threshold >= -1.0 && cosine_threshold <= 1.0)) {
    throw std::invalid_argument("eval: cosine_threshold must lie in [-1, 1]");
  }
}

std::vector<AdversarialCandidate> dedup(std::span<const AdversarialCandidate> candidates) {
  std::set<std::pair<std::string_view, std::string_view>> seen;
  std::vector<AdversarialCandidate> out;
  for (const auto& c : candidates) {
    if (seen.emplace(c.sample_id, c.text).second) out.push_back(c);
  }
  return out;
}

std::vector<AdversarialCandidate> drop_non_degrading(std::span<const AdversarialCandidate> candidates,
                                                     double original_iou) {
  std::vector<AdversarialCandidate> out;
  for (const auto& c : candidates) {
    if (c.iou < original_iou) out.push_back(c);
  }
  return out;
}

CosineVerdict cosine_filter(Embedder& embedder, const std::string& original,
                            const std::string& paraphrase, double threshold) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw std::invalid_argument("cosine_filter: threshold must lie in [-1, 1]");
  }
  const auto a = embed_text(embedder, original);
  const auto b = embed_text(embedder, paraphrase);
  CosineVerdict v;
  v.cosine = cosine_similarity(a, b);
  v.ok = v.cosine > threshold;
  return v;
}

int judge_validity(Judge& judge, const std::string& original, const std::string& paraphrase) {
  return parse_judge_score(judge.score(original, paraphrase));
}

int CachedJudge::score(const std::string& original, const std::string& paraphrase) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = scores_.find({original, paraphrase}); it != scores_.end()) return it->second;
  }
  const int s = judge_validity(inner_, original, paraphrase);
  std::lock_guard lock(mutex_);
  return scores_.try_emplace({original, paraphrase}, s).first->second;
}

std::size_t CachedJudge::size() const {
  std::lock_guard lock(mutex_);
  return scores_.size();
}

double relative_iou_drop(double original_iou, double adv_iou) {
  if (!(original_iou > 0.0)) {
    throw std::invalid_argument("relative_iou_drop: original IoU must be positive");
  }
  return 100.0 * (original_iou - adv_iou) / original_iou;
}

std::optional<std::size_t> select_best(std::span<const AdversarialCandidate> valid, double original_iou) {
  std::optional<std::size_t> best;
  double best_drop = 0.0;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    const double drop = relative_iou_drop(original_iou, valid[i].iou);
    if (!best || drop > best_drop) {
      best = i;
      best_drop = drop;
    }
  }
  return best;
}

SRCurve sr_curve(std::span<const std::optional<double>> best_drops) {
  if (best_drops.empty()) throw std::invalid_argument("sr_curve: no samples");
  std::vector<double> drops;
  for (const auto& d : best_drops) {
    if (d) drops.push_back(*d);
  }
  std::sort(drops.begin(), drops.end());
  const double total = static_cast<double>(best_drops.size());

  SRCurve curve;
  double sum = 0.0;
  for (int theta = 0; theta <= kThresholdGridMax; ++theta) {
    const auto first = std::lower_bound(drops.begin(), drops.end(), static_cast<double>(theta));
    const auto hits = static_cast<double>(drops.end() - first);
    const double sr = hits / total;
    curve.grid.push_back(theta);
    curve.sr.push_back(sr);
    sum += sr;
  }
  curve.msr = sum / static_cast<double>(kThresholdGridMax + 1);
  curve.sr5 = curve.sr[5];
  curve.sr10 = curve.sr[10];
  return curve;
}

namespace {

bool passes(ValidityCheck check, const AdversarialCandidate& c, const SampleOriginal& original,
            Embedder& embedder, Judge& judge, const EvalConfig& config) {
  switch (check) {
    case ValidityCheck::kRegex:
      return regex_consistency(original.text, c.text, config.terminal_punctuation);
    case ValidityCheck::kCosine:
      try {
        return cosine_filter(embedder, original.text, c.text, config.cosine_threshold).ok;
      } catch (const std::domain_error&) {
        return false;
      }
    case ValidityCheck::kJudge:
      return judge_validity(judge, original.text, c.text) == 5;
  }
  return false;
}

}  // namespace

std::vector<AdversarialCandidate> apply_validity_checks(std::span<const AdversarialCandidate> candidates,
                                                        const SampleOriginal& original,
                                                        std::span<const ValidityCheck> order,
                                                        Embedder& embedder, Judge& judge,
                                                        const EvalConfig& config) {
  std::vector<AdversarialCandidate> current(candidates.begin(), candidates.end());
  for (ValidityCheck check : order) {
    std::vector<AdversarialCandidate> next;
    for (auto& c : current) {
      if (passes(check, c, original, embedder, judge, config)) next.push_back(std::move(c));
    }
    current = std::move(next);
  }
  return current;
}

SampleOutcome evaluate_sample(const SampleOriginal& original,
                              std::span<const AdversarialCandidate> candidates, Embedder& embedder,
                              Judge& judge, const EvalConfig& config) {
  SampleOutcome out;
  out.original = original;
  out.unattackable = !(original.iou > 0.0);

  std::set<std::string_view> seen;
  std::vector<AdversarialCandidate> valid;
  for (const auto& c : candidates) {
    CandidateVerdict cv;
    cv.candidate = c;
    ValidityVerdict& v = cv.verdict;
    v.duplicate = !seen.insert(c.text).second;
    v.degrades = c.iou < original.iou;
    v.regex_ok = regex_consistency(original.text, c.text, config.terminal_punctuation);
    if (!out.unattackable) cv.delta_iou = relative_iou_drop(original.iou, c.iou);

    if (!v.duplicate && v.degrades) {
      try {
        const auto cos = cosine_filter(embedder, original.text, c.text, config.cosine_threshold);
        v.cosine = cos.cosine;
        v.cosine_ok = cos.ok;
      } catch (const std::domain_error&) {
        v.cosine_ok = false;
      } catch (const std::invalid_argument&) {
        v.cosine_ok = false;
      }
      if (v.regex_ok && v.cosine_ok) v.llm_score = judge_validity(judge, original.text, c.text);
    }
    v.valid = !v.duplicate && v.degrades && v.regex_ok && v.cosine_ok && v.llm_score == 5;
    if (v.valid) valid.push_back(c);
    out.verdicts.push_back(std::move(cv));
  }

  if (!out.unattackable) {
    if (auto best = select_best(valid, original.iou)) {
      out.best = valid[*best];
      out.best_delta = relative_iou_drop(original.iou, valid[*best].iou);
    }
  }
  return out;
}

EvaluationReport evaluate_pool(const std::vector<SampleOriginal>& originals,
                               std::span<const AdversarialCandidate> pool, Embedder& embedder,
                               Judge& judge, const EvalConfig& config) {
  config.validate();
  std::unordered_map<std::string, std::vector<AdversarialCandidate>> by_sample;
  std::set<std::string> known;
  for (const auto& o : originals) {
    if (!known.insert(o.sample_id).second) {
      throw std::invalid_argument("evaluate_pool: duplicate original for " + o.sample_id);
    }
  }
  EvaluationReport report;
  std::set<std::string> unknown;
  for (const auto& c : pool) {
    if (!known.count(c.sample_id)) {
      unknown.insert(c.sample_id);
      continue;
    }
    by_sample[c.sample_id].push_back(c);
  }
  report.unknown_samples.assign(unknown.begin(), unknown.end());

  std::vector<std::optional<double>> drops;
  for (const auto& o : originals) {
    const auto& cands = by_sample[o.sample_id];
    SampleOutcome outcome = evaluate_sample(o, cands, embedder, judge, config);
    if (outcome.unattackable) {
      report.unattackable.push_back(o.sample_id);
    } else {
      drops.push_back(outcome.best_delta);
    }
    report.samples.push_back(std::move(outcome));
  }
  report.curve = sr_curve(drops);
  return report;
}

EvaluationReport unify(const std::vector<SampleOriginal>& originals,
                       std::span<const std::vector<AdversarialCandidate>> pools, Embedder& embedder,
                       Judge& judge, const EvalConfig& config) {
  std::vector<AdversarialCandidate> merged;
  for (const auto& pool : pools) merged.insert(merged.end(), pool.begin(), pool.end());
  return evaluate_pool(originals, merged, embedder, judge, config);
}

}  // namespace latentpara
