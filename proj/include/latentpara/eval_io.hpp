#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentpara/eval_protocol.hpp"

namespace latentpara {

template <typename T>
struct LoadResult {
  std::vector<T> rows;
  std::size_t malformed = 0;  ///< lines that were skipped
};

/// JSONL of {sample_id, text, iou, source_attack}. A line that is not an
/// object with those fields (iou in [0,1]) is skipped and counted. A missing
/// source_attack defaults to `default_label`.
LoadResult<AdversarialCandidate> load_candidates(const std::filesystem::path& path,
                                                 const std::string& default_label = "external");

/// JSONL of {sample_id, text, iou}. Malformed lines are skipped and counted.
LoadResult<SampleOriginal> load_originals(const std::filesystem::path& path);

struct RunPool {
  std::vector<SampleOriginal> originals;
  std::vector<AdversarialCandidate> candidates;
  std::size_t failed_samples = 0;
  std::size_t malformed = 0;
};

/// Originals and candidates from an attack run directory. `pool_mode`
/// "means" takes each iteration's decoded mean; "all" adds every sampled
/// candidate. Samples without an original IoU are counted as failed.
RunPool load_run_pool(const std::filesystem::path& run_dir, const std::string& pool_mode,
                      const std::string& label);

nlohmann::ordered_json verdict_to_json(const std::string& sample_id, const CandidateVerdict& verdict);
nlohmann::ordered_json curve_to_json(const EvaluationReport& report);
nlohmann::ordered_json winner_to_json(const SampleOutcome& outcome);

/// "mSR,SR_5,SR_10" header plus one row of fractions in [0,1].
std::string metrics_csv(const SRCurve& curve);

/// verdicts.jsonl, winners.jsonl, curve.json and metrics.csv under `out_dir`.
void write_evaluation(const std::filesystem::path& out_dir, const EvaluationReport& report);

}  // namespace latentpara
