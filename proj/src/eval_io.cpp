#include "latentpara/eval_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "latentpara/errors.hpp"
#include "latentpara/run_store.hpp"
#include "latentpara/trajectory_io.hpp"

namespace latentpara {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

bool read_iou(const json& j, double& iou) {
  if (!j.contains("iou") || !j["iou"].is_number()) return false;
  iou = j["iou"].get<double>();
  return iou >= 0.0 && iou <= 1.0;
}

bool read_string(const json& j, const char* key, std::string& out) {
  if (!j.contains(key) || !j[key].is_string()) return false;
  out = j[key].get<std::string>();
  return true;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

LoadResult<AdversarialCandidate> load_candidates(const std::filesystem::path& path,
                                                 const std::string& default_label) {
  auto in = open_input(path);
  LoadResult<AdversarialCandidate> result;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    const json j = json::parse(line, nullptr, false);
    AdversarialCandidate c;
    if (!j.is_object() || !read_string(j, "sample_id", c.sample_id) || !read_string(j, "text", c.text) ||
        !read_iou(j, c.iou)) {
      ++result.malformed;
      continue;
    }
    if (j.contains("source_attack")) {
      if (!read_string(j, "source_attack", c.source_attack)) {
        ++result.malformed;
        continue;
      }
    } else {
      c.source_attack = default_label;
    }
    result.rows.push_back(std::move(c));
  }
  return result;
}

LoadResult<SampleOriginal> load_originals(const std::filesystem::path& path) {
  auto in = open_input(path);
  LoadResult<SampleOriginal> result;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    const json j = json::parse(line, nullptr, false);
    SampleOriginal o;
    if (!j.is_object() || !read_string(j, "sample_id", o.sample_id) || !read_string(j, "text", o.text) ||
        !read_iou(j, o.iou)) {
      ++result.malformed;
      continue;
    }
    result.rows.push_back(std::move(o));
  }
  return result;
}

RunPool load_run_pool(const std::filesystem::path& run_dir, const std::string& pool_mode,
                      const std::string& label) {
  if (pool_mode != "means" && pool_mode != "all") {
    throw ConfigError("candidate pool must be \"means\" or \"all\"");
  }
  const RunManifest manifest = read_manifest(run_dir);
  RunPool pool;
  for (const SampleStatus& s : manifest.samples) {
    if (!s.has_original_iou) {
      ++pool.failed_samples;
      continue;
    }
    if (s.status != "complete") ++pool.failed_samples;
    pool.originals.push_back({s.sample_id, s.original_text, s.original_iou});
    const auto path = trajectory_path(run_dir, s.sample_id);
    if (!std::filesystem::exists(path)) continue;
    AttackTrajectory trajectory;
    try {
      trajectory = read_trajectory(path);
    } catch (const std::exception&) {
      ++pool.malformed;
      continue;
    }
    for (const IterationRecord& it : trajectory.iterations) {
      if (pool_mode == "all") {
        for (const CandidateRecord& c : it.candidates) {
          pool.candidates.push_back({s.sample_id, c.text, c.iou, label});
        }
      }
      pool.candidates.push_back({s.sample_id, it.mean_text, it.mean_iou, label});
    }
  }
  return pool;
}

ordered_json verdict_to_json(const std::string& sample_id, const CandidateVerdict& v) {
  ordered_json j{{"sample_id", sample_id},
                 {"text", v.candidate.text},
                 {"iou", v.candidate.iou},
                 {"source_attack", v.candidate.source_attack},
                 {"delta_iou", optional_number(v.delta_iou)},
                 {"duplicate", v.verdict.duplicate},
                 {"degrades", v.verdict.degrades},
                 {"regex_ok", v.verdict.regex_ok},
                 {"cosine", optional_number(v.verdict.cosine)},
                 {"cosine_ok", v.verdict.cosine_ok}};
  j["llm_score"] = v.verdict.llm_score ? ordered_json(*v.verdict.llm_score) : ordered_json(nullptr);
  j["valid"] = v.verdict.valid;
  return j;
}

ordered_json curve_to_json(const EvaluationReport& report) {
  std::size_t succeeded = 0;
  for (const SampleOutcome& s : report.samples) succeeded += s.best.has_value();
  return ordered_json{{"grid", report.curve.grid},
                      {"sr", report.curve.sr},
                      {"msr", report.curve.msr},
                      {"sr5", report.curve.sr5},
                      {"sr10", report.curve.sr10},
                      {"samples", report.samples.size() - report.unattackable.size()},
                      {"with_valid_paraphrase", succeeded},
                      {"unattackable", report.unattackable},
                      {"unknown_samples", report.unknown_samples}};
}

ordered_json winner_to_json(const SampleOutcome& o) {
  ordered_json j{{"sample_id", o.original.sample_id},
                 {"original_text", o.original.text},
                 {"original_iou", o.original.iou}};
  if (o.unattackable) {
    j["status"] = "unattackable";
  } else if (o.best) {
    j["status"] = "success";
    j["text"] = o.best->text;
    j["iou"] = o.best->iou;
    j["delta_iou"] = *o.best_delta;
    j["source_attack"] = o.best->source_attack;
  } else {
    j["status"] = "no_valid_paraphrase";
  }
  return j;
}

std::string metrics_csv(const SRCurve& curve) {
  char row[96];
  std::snprintf(row, sizeof row, "%.6f,%.6f,%.6f\n", curve.msr, curve.sr5, curve.sr10);
  return std::string("mSR,SR_5,SR_10\n") + row;
}

void write_evaluation(const std::filesystem::path& out_dir, const EvaluationReport& report) {
  std::filesystem::create_directories(out_dir);
  std::ostringstream verdicts;
  std::ostringstream winners;
  for (const SampleOutcome& s : report.samples) {
    for (const CandidateVerdict& v : s.verdicts) {
      verdicts << verdict_to_json(s.original.sample_id, v).dump() << '\n';
    }
    winners << winner_to_json(s).dump() << '\n';
  }
  write_file_atomic(out_dir / "verdicts.jsonl", verdicts.str());
  write_file_atomic(out_dir / "winners.jsonl", winners.str());
  write_file_atomic(out_dir / "curve.json", curve_to_json(report).dump(2) + "\n");
  write_file_atomic(out_dir / "metrics.csv", metrics_csv(report.curve));
}

}  // namespace latentpara
