#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latentpara/oracles.hpp"
#include "latentpara/text_checks.hpp"

namespace latentpara {

/// A paraphrase produced by some attack, with the IoU it obtained.
struct AdversarialCandidate {
  std::string sample_id;
  std::string text;
  double iou = 0.0;
  std::string source_attack;

  friend bool operator==(const AdversarialCandidate&, const AdversarialCandidate&) = default;
};

/// The unattacked query of a sample and its IoU.
struct SampleOriginal {
  std::string sample_id;
  std::string text;
  double iou = 0.0;
};

struct ValidityVerdict {
  bool duplicate = false;
  bool degrades = false;
  bool regex_ok = false;
  std::optional<double> cosine;  ///< absent when the candidate was already rejected
  bool cosine_ok = false;
  std::optional<int> llm_score;  ///< absent unless regex and cosine passed
  bool valid = false;
};

struct EvalConfig {
  double cosine_threshold = 0.825;
  std::string terminal_punctuation{kDefaultTerminalPunctuation};

  void validate() const;
};

/// Keep the first occurrence of each exact text per sample_id.
std::vector<AdversarialCandidate> dedup(std::span<const AdversarialCandidate> candidates);

/// Keep candidates with iou strictly below original_iou.
std::vector<AdversarialCandidate> drop_non_degrading(std::span<const AdversarialCandidate> candidates,
                                                     double original_iou);

struct CosineVerdict {
  double cosine = 0.0;
  bool ok = false;
};

/// Cosine of the two embeddings; ok iff cosine > threshold (strict).
/// Throws std::domain_error on a zero-norm embedding.
CosineVerdict cosine_filter(Embedder& embedder, const std::string& original,
                            const std::string& paraphrase, double threshold = 0.825);

/// The judge's score; anything outside 1..5 is a ProtocolError.
int judge_validity(Judge& judge, const std::string& original, const std::string& paraphrase);

/// Memoizes scores per (original, paraphrase).
class CachedJudge : public Judge {
 public:
  explicit CachedJudge(Judge& inner) : inner_(inner) {}
  int score(const std::string& original, const std::string& paraphrase) override;
  std::size_t size() const;

 private:
  Judge& inner_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, int> scores_;
};

/// 100 * (original - adversarial) / original, in percent. Negative when the
/// paraphrase improved the IoU. Throws std::invalid_argument if original <= 0.
double relative_iou_drop(double original_iou, double adv_iou);

/// Index of the candidate with the largest relative drop; earliest wins ties.
std::optional<std::size_t> select_best(std::span<const AdversarialCandidate> valid, double original_iou);

/// Success rate over the integer thresholds 0..100 (percent).
struct SRCurve {
  std::vector<int> grid;
  std::vector<double> sr;
  double msr = 0.0;
  double sr5 = 0.0;
  double sr10 = 0.0;
};

inline constexpr int kThresholdGridMax = 100;

/// One entry per sample: the best valid paraphrase's drop, or nullopt when
/// the sample has no valid paraphrase. SR_theta counts entries with a drop
/// >= theta; mSR is the mean of SR over the 101 grid points. Throws
/// std::invalid_argument on an empty input.
SRCurve sr_curve(std::span<const std::optional<double>> best_drops);

enum class ValidityCheck { kRegex, kCosine, kJudge };

/// Apply the three validity predicates in the given order (each at most
/// once). The predicates are independent, so the surviving set does not
/// depend on the order.
std::vector<AdversarialCandidate> apply_validity_checks(std::span<const AdversarialCandidate> candidates,
                                                        const SampleOriginal& original,
                                                        std::span<const ValidityCheck> order,
                                                        Embedder& embedder, Judge& judge,
                                                        const EvalConfig& config);

struct CandidateVerdict {
  AdversarialCandidate candidate;
  ValidityVerdict verdict;
  std::optional<double> delta_iou;  ///< set when original_iou > 0
};

struct SampleOutcome {
  SampleOriginal original;
  std::vector<CandidateVerdict> verdicts;
  std::optional<AdversarialCandidate> best;
  std::optional<double> best_delta;
  /// original_iou == 0: nothing can be reduced; left out of the SR denominator.
  bool unattackable = false;
};

/// Full pipeline for one sample: dedup, degrade, regex, cosine, judge
/// (judge only for candidates that passed regex and cosine), then
/// select_best among the valid ones.
SampleOutcome evaluate_sample(const SampleOriginal& original,
                              std::span<const AdversarialCandidate> candidates, Embedder& embedder,
                              Judge& judge, const EvalConfig& config);

struct EvaluationReport {
  std::vector<SampleOutcome> samples;  ///< in the order of `originals`
  SRCurve curve;
  std::vector<std::string> unattackable;
  /// sample_ids seen in the pool without an entry in `originals`
  std::vector<std::string> unknown_samples;
};

/// Evaluate a candidate pool against every original. Samples with no
/// candidates count as failures. Throws std::invalid_argument when no
/// sample is left for the SR denominator.
EvaluationReport evaluate_pool(const std::vector<SampleOriginal>& originals,
                               std::span<const AdversarialCandidate> pool, Embedder& embedder,
                               Judge& judge, const EvalConfig& config);

/// Unified attack: concatenate the pools per sample, run the full pipeline,
/// keep the best; the winner keeps its source_attack tag.
EvaluationReport unify(const std::vector<SampleOriginal>& originals,
                       std::span<const std::vector<AdversarialCandidate>> pools, Embedder& embedder,
                       Judge& judge, const EvalConfig& config);

}  // namespace latentpara
