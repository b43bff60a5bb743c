#include "latentpara/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "latentpara/analysis_io.hpp"
#include "latentpara/attack_driver.hpp"
#include "latentpara/conformance.hpp"
#include "latentpara/dataset.hpp"
#include "latentpara/errors.hpp"
#include "latentpara/eval_io.hpp"
#include "latentpara/protocol.hpp"
#include "latentpara/response_cache.hpp"
#include "latentpara/run_store.hpp"
#include "latentpara/synthetic_oracles.hpp"
#include "latentpara/trajectory_io.hpp"

namespace latentpara {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

ToolConfig resolve_config(const CommonOptions& o, const std::map<std::string, std::string>& env,
                          const ToolConfig& base) {
  std::optional<fs::path> path;
  if (o.config_path) path = *o.config_path;
  ToolConfig config = load_config(path, env, base);
  if (o.seed) config.attack.seed = *o.seed;
  if (o.parallelism) {
    if (*o.parallelism == 0) throw ConfigError("--parallelism must be >= 1");
    config.run.parallelism = *o.parallelism;
  }
  if (o.oracle_encode) config.oracles.encode = *o.oracle_encode;
  if (o.oracle_segment) config.oracles.segment = *o.oracle_segment;
  if (o.oracle_embed) config.oracles.embed = *o.oracle_embed;
  if (o.oracle_judge) config.oracles.judge = *o.oracle_judge;
  for (const std::string& e : {config.oracles.encode, config.oracles.segment, config.oracles.embed,
                               config.oracles.judge}) {
    EndpointSpec::parse(e);
  }
  return config;
}

namespace {

class ClientPool {
 public:
  explicit ClientPool(const OracleEndpoints& endpoints) : endpoints_(endpoints) {}

  std::shared_ptr<ProtocolClient> get(const EndpointSpec& spec) {
    const std::string key = spec.to_string();
    auto it = clients_.find(key);
    if (it != clients_.end()) return it->second;
    EndpointSpec configured = spec;
    configured.timeout_ms = endpoints_.timeout_ms;
    configured.max_concurrency = endpoints_.max_concurrency;
    auto client = std::make_shared<ProtocolClient>(make_transport(configured), configured.max_concurrency);
    try {
      client->ping();
    } catch (const OracleError& e) {
      throw OracleError("oracle " + key + " failed the health ping: " + e.what());
    }
    clients_.emplace(key, client);
    return client;
  }

 private:
  const OracleEndpoints& endpoints_;
  std::map<std::string, std::shared_ptr<ProtocolClient>> clients_;
};

std::shared_ptr<ProtocolHandler> synthetic_handler(const ToolConfig& config) {
  auto handler = std::make_shared<ProtocolHandler>();
  const SyntheticOracleConfig& s = config.synthetic;
  handler->autoencoder = std::make_shared<LatticeAutoencoder>(s.dim, s.lattice_step);
  handler->segmenter = std::make_shared<BowlSegmenter>(handler->autoencoder, s.tau, s.mask_mode);
  handler->embedder = std::make_shared<SyntheticEmbedder>(s.hash_dim);
  handler->judge = std::make_shared<StubJudge>(handler->embedder, config.eval.filters.cosine_threshold,
                                               config.eval.filters.terminal_punctuation);
  return handler;
}

nlohmann::json config_snapshot(const ToolConfig& config) {
  // Execution-only settings (thread count, cache location) do not affect
  // results and are left out so artifacts compare equal across them.
  json j = json::parse(config_to_json(config).dump());
  j.erase("run");
  return j;
}

struct AttackOutcome {
  int status = kExitOk;
  std::vector<AttackTrajectory> trajectories;
};

AttackOutcome attack_into(const ToolConfig& config, const std::vector<QuerySample>& dataset,
                          const OracleBundle& oracles, const fs::path& out_dir, const std::string& run_id,
                          bool force, std::ostream& out, std::ostream& err) {
  AttackOutcome outcome;
  const fs::path manifest_path = out_dir / kManifestFile;
  if (fs::exists(manifest_path)) {
    if (!force) {
      err << "error: " << out_dir.string() << " already holds a run (use --force to replace it)\n";
      outcome.status = kExitUsage;
      return outcome;
    }
    try {
      for (const SampleStatus& s : read_manifest(out_dir).samples) {
        fs::remove(trajectory_path(out_dir, s.sample_id));
      }
    } catch (const ConfigError&) {
    }
  }

  ResponseCache cache;
  if (!config.run.cache_path.empty() && fs::exists(config.run.cache_path)) {
    cache.load(config.run.cache_path);
  }
  const AttackOracles view{oracles.autoencoder.get(), oracles.segmenter.get(), &cache};
  outcome.trajectories = run_dataset(dataset, config.attack, view, config.run.parallelism);

  fs::create_directories(out_dir);
  RunManifest manifest;
  manifest.run_id = run_id;
  manifest.created_at = timestamp_now();
  manifest.tool_version = tool_version();
  manifest.global_seed = config.attack.seed;
  manifest.config = config_snapshot(config);
  std::size_t failed = 0;
  for (const AttackTrajectory& t : outcome.trajectories) {
    write_trajectory(out_dir, t);
    SampleStatus s;
    s.sample_id = t.sample_id;
    s.status = t.complete ? "complete" : "failed";
    s.original_text = t.original_text;
    s.original_iou = t.original_iou;
    s.has_original_iou = t.has_original_iou;
    s.seed = t.seed;
    s.error = t.error;
    manifest.samples.push_back(s);
    if (t.complete) {
      const IterationRecord& last = t.iterations.back();
      char line[160];
      std::snprintf(line, sizeof line, "%s: original_iou=%.6f final_mean_iou=%.6f\n",
                    t.sample_id.c_str(), t.original_iou, last.mean_iou);
      out << line;
    } else {
      ++failed;
      err << "warning: sample " << t.sample_id << " failed: " << t.error << "\n";
    }
  }
  write_manifest(out_dir, manifest, true);
  if (!config.run.cache_path.empty()) cache.save(config.run.cache_path);
  out << "run " << run_id << ": " << (outcome.trajectories.size() - failed) << "/"
      << outcome.trajectories.size() << " samples complete\n";
  outcome.status = failed ? kExitPartial : kExitOk;
  return outcome;
}

struct EvalOutcome {
  int status = kExitOk;
  std::optional<EvaluationReport> report;
};

EvalOutcome evaluate_into(const ToolConfig& config, const std::vector<SampleOriginal>& originals,
                          std::span<const std::vector<AdversarialCandidate>> pools,
                          const OracleBundle& oracles, const fs::path& out_dir, std::size_t problems,
                          std::ostream& out, std::ostream& err) {
  EvalOutcome outcome;
  CachedJudge judge(*oracles.judge);
  try {
    outcome.report = unify(originals, pools, *oracles.embedder, judge, config.eval.filters);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    outcome.status = kExitUsage;
    return outcome;
  }
  const EvaluationReport& report = *outcome.report;
  write_evaluation(out_dir, report);
  for (const std::string& id : report.unattackable) {
    err << "warning: sample " << id << " has original IoU 0 and is excluded from SR\n";
  }
  for (const std::string& id : report.unknown_samples) {
    err << "warning: candidates for unknown sample " << id << " were ignored\n";
  }
  char line[128];
  std::snprintf(line, sizeof line, "mSR=%.6f SR_5=%.6f SR_10=%.6f\n", report.curve.msr, report.curve.sr5,
                report.curve.sr10);
  out << line;
  outcome.status = problems || !report.unknown_samples.empty() ? kExitPartial : kExitOk;
  return outcome;
}

int fail(std::ostream& err, const std::string& message) {
  err << "error: " << message << "\n";
  return kExitUsage;
}

}  // namespace

OracleBundle make_oracles(const ToolConfig& config, OracleNeeds needs) {
  OracleBundle bundle;
  ClientPool clients(config.oracles);
  std::shared_ptr<ProtocolHandler> synthetic;
  auto synth = [&]() -> ProtocolHandler& {
    if (!synthetic) synthetic = synthetic_handler(config);
    return *synthetic;
  };
  if (needs.attack) {
    const auto enc = EndpointSpec::parse(config.oracles.encode);
    bundle.autoencoder = enc.kind == EndpointSpec::Kind::kSynthetic
                             ? synth().autoencoder
                             : std::make_shared<RemoteAutoencoder>(clients.get(enc));
    const auto seg = EndpointSpec::parse(config.oracles.segment);
    if (seg.kind == EndpointSpec::Kind::kSynthetic) {
      bundle.segmenter = std::make_shared<BowlSegmenter>(bundle.autoencoder, config.synthetic.tau,
                                                         config.synthetic.mask_mode);
    } else {
      bundle.segmenter = std::make_shared<RemoteSegmenter>(clients.get(seg));
    }
  }
  if (needs.eval) {
    const auto emb = EndpointSpec::parse(config.oracles.embed);
    bundle.embedder = emb.kind == EndpointSpec::Kind::kSynthetic
                          ? synth().embedder
                          : std::make_shared<RemoteEmbedder>(clients.get(emb));
    const auto jud = EndpointSpec::parse(config.oracles.judge);
    if (jud.kind == EndpointSpec::Kind::kSynthetic) {
      bundle.judge = std::make_shared<StubJudge>(bundle.embedder, config.eval.filters.cosine_threshold,
                                                 config.eval.filters.terminal_punctuation);
    } else {
      bundle.judge = std::make_shared<RemoteJudge>(clients.get(jud));
    }
  }
  return bundle;
}

ToolConfig synth_bench_config() {
  ToolConfig c;
  c.attack.candidates = 8;
  c.attack.iterations = 10;
  c.attack.sigma_init = 0.5;
  c.attack.weights.lambda_adv = 1.0;
  c.attack.weights.lambda_sim = 0.0;
  c.attack.learning_rates.mu = 0.2;
  c.attack.learning_rates.lambda_pre = 0.01;
  c.attack.learning_rates.value = 0.01;
  c.attack.seed = 123;
  return c;
}

int cmd_attack(const AttackOptions& o, std::ostream& out, std::ostream& err) {
  ToolConfig config;
  std::vector<QuerySample> dataset;
  OracleBundle oracles;
  try {
    config = resolve_config(o.common, environment_overrides());
    if (o.dataset_path.empty()) return fail(err, "--dataset is required");
    if (o.out_dir.empty()) return fail(err, "--out is required");
    dataset = load_dataset(o.dataset_path);
    if (dataset.empty()) return fail(err, "dataset " + o.dataset_path + " is empty");
    if (fs::exists(fs::path(o.out_dir) / kManifestFile) && !o.force) {
      return fail(err, o.out_dir + " already holds a run (use --force to replace it)");
    }
    oracles = make_oracles(config, {.attack = true, .eval = false});
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
  const fs::path out_dir(o.out_dir);
  const std::string run_id = o.run_id.value_or(fs::absolute(out_dir).lexically_normal().filename().string());
  try {
    return attack_into(config, dataset, oracles, out_dir, run_id, o.force, out, err).status;
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
}

int cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const ToolConfig config = resolve_config(o.common, environment_overrides());
    if (o.run_dir.has_value() == o.candidates_path.has_value()) {
      return fail(err, "give exactly one of --run or --candidates");
    }
    if (o.out_dir.empty()) return fail(err, "--out is required");
    std::vector<SampleOriginal> originals;
    std::vector<AdversarialCandidate> pool;
    std::size_t problems = 0;
    if (o.run_dir) {
      if (o.originals_path) return fail(err, "--originals cannot be combined with --run");
      RunPool run = load_run_pool(*o.run_dir, config.eval.candidate_pool, config.eval.attack_label);
      if (run.failed_samples) err << "warning: " << run.failed_samples << " sample(s) of the run failed\n";
      if (run.malformed) err << "warning: " << run.malformed << " unreadable trajectory file(s)\n";
      problems = run.failed_samples + run.malformed;
      originals = std::move(run.originals);
      pool = std::move(run.candidates);
    } else {
      if (!o.originals_path) return fail(err, "--candidates needs --originals");
      auto candidates = load_candidates(*o.candidates_path);
      auto loaded = load_originals(*o.originals_path);
      if (candidates.malformed) err << "warning: skipped " << candidates.malformed << " malformed candidate line(s)\n";
      if (loaded.malformed) err << "warning: skipped " << loaded.malformed << " malformed original line(s)\n";
      problems = candidates.malformed + loaded.malformed;
      originals = std::move(loaded.rows);
      pool = std::move(candidates.rows);
    }
    if (pool.empty()) return fail(err, "no candidates to evaluate");
    if (originals.empty()) return fail(err, "no original samples");
    const OracleBundle oracles = make_oracles(config, {.attack = false, .eval = true});
    const std::vector<std::vector<AdversarialCandidate>> pools{std::move(pool)};
    return evaluate_into(config, originals, pools, oracles, o.out_dir, problems, out, err).status;
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
}

int cmd_unify(const UnifyOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.inputs.empty()) return fail(err, "unify needs at least one input");
    if (o.out_dir.empty()) return fail(err, "--out is required");
    const ToolConfig config = resolve_config(o.common, environment_overrides());
    std::vector<SampleOriginal> originals;
    std::set<std::string> known;
    std::size_t problems = 0;
    auto add_originals = [&](const std::vector<SampleOriginal>& rows) {
      for (const SampleOriginal& r : rows) {
        if (known.insert(r.sample_id).second) originals.push_back(r);
      }
    };
    if (o.originals_path) {
      auto loaded = load_originals(*o.originals_path);
      if (loaded.malformed) err << "warning: skipped " << loaded.malformed << " malformed original line(s)\n";
      problems += loaded.malformed;
      add_originals(loaded.rows);
    }
    std::vector<std::vector<AdversarialCandidate>> pools;
    for (const std::string& input : o.inputs) {
      if (fs::is_directory(input)) {
        RunPool run = load_run_pool(input, config.eval.candidate_pool, config.eval.attack_label);
        problems += run.failed_samples + run.malformed;
        add_originals(run.originals);
        pools.push_back(std::move(run.candidates));
      } else {
        auto candidates = load_candidates(input);
        if (candidates.malformed) {
          err << "warning: skipped " << candidates.malformed << " malformed line(s) in " << input << "\n";
        }
        problems += candidates.malformed;
        pools.push_back(std::move(candidates.rows));
      }
    }
    if (originals.empty()) return fail(err, "no original samples (pass --originals or a run directory)");
    const OracleBundle oracles = make_oracles(config, {.attack = false, .eval = true});
    const EvalOutcome outcome = evaluate_into(config, originals, pools, oracles, o.out_dir, problems, out, err);
    if (outcome.report) {
      std::map<std::string, std::size_t> wins;
      for (const SampleOutcome& s : outcome.report->samples) {
        if (s.best) ++wins[s.best->source_attack];
      }
      out << "winners:";
      for (const auto& [label, count] : wins) out << " " << label << "=" << count;
      out << "\n";
    }
    return outcome.status;
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.out_dir.empty()) return fail(err, "--out is required");
    const auto embeddings = load_embeddings(o.embeddings_path);
    if (embeddings.empty()) return fail(err, "no embeddings in " + o.embeddings_path);
    GeometryReport report;
    try {
      report = analyze_geometry(embeddings, o.normalize_csr);
    } catch (const std::invalid_argument& e) {
      return fail(err, std::string("nnr: ") + e.what());
    }
    for (const std::string& w : report.warnings) err << "warning: " << w << "\n";
    fs::create_directories(o.out_dir);
    write_file_atomic(fs::path(o.out_dir) / "report.json", geometry_to_json(report).dump(2) + "\n");
    if (report.per_dim_r) {
      write_file_atomic(fs::path(o.out_dir) / "top_dimensions.csv",
                        top_dimensions_csv(*report.per_dim_r, o.top_k));
    }
    char line[128];
    std::snprintf(line, sizeof line, "nnr=%.6f", report.nnr);
    out << line;
    if (report.csr) {
      std::snprintf(line, sizeof line, " csr=%.6f", *report.csr);
      out << line;
    } else {
      out << " csr=null";
    }
    out << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
}

int cmd_synth_bench(const SynthBenchOptions& o, std::ostream& out, std::ostream& err) {
  ToolConfig config;
  try {
    config = resolve_config(o.common, environment_overrides(), synth_bench_config());
    if (o.out_dir.empty()) return fail(err, "--out is required");
    if (o.samples == 0) return fail(err, "--samples must be >= 1");
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
  for (std::string* e : {&config.oracles.encode, &config.oracles.segment, &config.oracles.embed,
                         &config.oracles.judge}) {
    if (*e != "synthetic") err << "warning: synth-bench ignores oracle endpoint " << *e << "\n";
    *e = "synthetic";
  }
  const fs::path root(o.out_dir);
  const fs::path report_path = root / "report.json";
  if (fs::exists(report_path) && !o.force) {
    return fail(err, o.out_dir + " already holds a benchmark (use --force to replace it)");
  }
  try {
    SyntheticDatasetOptions dopt;
    dopt.count = o.samples;
    dopt.dim = config.synthetic.dim;
    dopt.step = config.synthetic.lattice_step;
    dopt.with_masks = config.synthetic.mask_mode;
    dopt.seed = config.attack.seed;
    const auto dataset = make_synthetic_dataset(dopt);
    fs::create_directories(root);
    write_dataset(root / "dataset.jsonl", dataset);

    const OracleBundle oracles = make_oracles(config, {});
    const AttackOutcome attack =
        attack_into(config, dataset, oracles, root / "run", "synth-bench", true, out, err);
    if (attack.status == kExitUsage) return attack.status;

    std::vector<SampleOriginal> originals;
    std::vector<AdversarialCandidate> pool;
    RunPool run = load_run_pool(root / "run", config.eval.candidate_pool, config.eval.attack_label);
    const std::vector<std::vector<AdversarialCandidate>> pools{std::move(run.candidates)};
    const EvalOutcome eval =
        evaluate_into(config, run.originals, pools, oracles, root / "eval", 0, out, err);
    if (!eval.report) return eval.status;

    ordered_json samples = ordered_json::array();
    for (const AttackTrajectory& t : attack.trajectories) {
      ordered_json row{{"sample_id", t.sample_id}, {"complete", t.complete}};
      row["original_iou"] = t.has_original_iou ? ordered_json(t.original_iou) : ordered_json(nullptr);
      row["final_mean_iou"] =
          t.iterations.empty() ? ordered_json(nullptr) : ordered_json(t.iterations.back().mean_iou);
      samples.push_back(std::move(row));
    }
    const SRCurve& curve = eval.report->curve;
    ordered_json report{{"seed", config.attack.seed},
                        {"config", ordered_json::parse(config_snapshot(config).dump())},
                        {"samples", std::move(samples)},
                        {"msr", curve.msr},
                        {"sr5", curve.sr5},
                        {"sr10", curve.sr10},
                        {"grid", curve.grid},
                        {"sr", curve.sr}};
    write_file_atomic(report_path, report.dump(2) + "\n");
    return std::max(attack.status, eval.status);
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
}

int cmd_make_synthetic_dataset(const SyntheticDatasetCommand& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.out_path.empty()) return fail(err, "--out is required");
    SyntheticDatasetOptions dopt;
    dopt.count = o.count;
    dopt.dim = o.dim;
    dopt.step = o.lattice_step;
    dopt.spread = o.spread;
    dopt.with_masks = o.with_masks;
    dopt.seed = o.seed;
    const auto dataset = make_synthetic_dataset(dopt);
    const fs::path path(o.out_path);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_dataset(path, dataset);
    out << "wrote " << dataset.size() << " samples to " << o.out_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
}

int cmd_serve_synthetic(const ServeOptions& o, std::istream& in, std::ostream& out, std::ostream& err) {
  std::shared_ptr<ProtocolHandler> handler;
  try {
    const ToolConfig config = resolve_config(o.common, environment_overrides());
    handler = synthetic_handler(config);
    if (o.dataset_path) {
      for (QuerySample& s : load_dataset(*o.dataset_path)) handler->register_sample(std::move(s));
    }
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
  if (!o.port) {
    serve_stdio(*handler, in, out);
    return kExitOk;
  }
  try {
    HttpOracleServer server(handler);
    const int port = server.bind(o.host, *o.port);
    err << "listening on http://" << o.host << ":" << port << "/\n";
    err.flush();
    server.run();
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
}

int cmd_conformance(const ConformanceCommand& o, std::ostream& out, std::ostream& err) {
  std::unique_ptr<Transport> transport;
  ConformanceOptions options;
  options.check_encode = !o.skip_encode;
  options.check_segment = !o.skip_segment;
  options.check_embed = !o.skip_embed;
  options.check_judge = !o.skip_judge;
  options.probe_text = o.probe_text;
  options.sample_id = o.sample_id;
  try {
    EndpointSpec spec = EndpointSpec::parse(o.endpoint);
    spec.timeout_ms = o.timeout_ms;
    if (spec.kind == EndpointSpec::Kind::kSynthetic) {
      auto handler = synthetic_handler(ToolConfig{});
      if (options.sample_id.empty()) {
        SyntheticDatasetOptions dopt;
        dopt.count = 1;
        auto sample = make_synthetic_dataset(dopt).front();
        options.sample_id = sample.sample_id;
        handler->register_sample(std::move(sample));
      }
      transport = std::make_unique<LoopbackTransport>(handler);
    } else {
      transport = make_transport(spec);
    }
  } catch (const std::exception& e) {
    return fail(err, e.what());
  }
  const ConformanceReport report = run_conformance(*transport, options);
  for (const ConformanceCheck& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << ": " << c.detail;
    out << "\n";
  }
  return report.passed() ? kExitOk : kExitPartial;
}

}  // namespace latentpara
