#include <iostream>

#include <CLI11.hpp>

#include "latentpara/commands.hpp"

namespace {

void add_common(CLI::App* cmd, latentpara::CommonOptions& c) {
  cmd->add_option("--config", c.config_path, "JSON config file");
  cmd->add_option("--seed", c.seed, "Global seed");
  cmd->add_option("--parallelism", c.parallelism, "Samples attacked concurrently");
  cmd->add_option("--oracle-encode", c.oracle_encode, "Autoencoder endpoint (http:URL, cmd:COMMAND or synthetic)");
  cmd->add_option("--oracle-segment", c.oracle_segment, "Segmentation endpoint");
  cmd->add_option("--oracle-embed", c.oracle_embed, "Sentence embedding endpoint");
  cmd->add_option("--oracle-judge", c.oracle_judge, "Paraphrase judge endpoint");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace latentpara;
  CLI::App app{"Latent-space adversarial paraphrasing against segmentation oracles"};
  app.set_version_flag("--version", std::string(LATENTPARA_VERSION));
  app.require_subcommand(1);

  AttackOptions attack;
  auto* attack_cmd = app.add_subcommand("attack", "Run the latent PPO attack over a dataset");
  add_common(attack_cmd, attack.common);
  attack_cmd->add_option("--dataset", attack.dataset_path, "Dataset JSONL")->required();
  attack_cmd->add_option("--out", attack.out_dir, "Run directory")->required();
  attack_cmd->add_option("--run-id", attack.run_id, "Run id (default: run directory name)");
  attack_cmd->add_flag("--force", attack.force, "Replace an existing run");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Filter candidates and compute SR curves");
  add_common(eval_cmd, eval.common);
  eval_cmd->add_option("--run", eval.run_dir, "Run directory from attack");
  eval_cmd->add_option("--candidates", eval.candidates_path, "Candidate JSONL");
  eval_cmd->add_option("--originals", eval.originals_path, "Original query JSONL (with --candidates)");
  eval_cmd->add_option("--out", eval.out_dir, "Output directory")->required();

  UnifyOptions unify;
  auto* unify_cmd = app.add_subcommand("unify", "Best paraphrase per sample across attacks");
  add_common(unify_cmd, unify.common);
  unify_cmd->add_option("inputs", unify.inputs, "Run directories or candidate JSONL files");
  unify_cmd->add_option("--originals", unify.originals_path, "Original query JSONL");
  unify_cmd->add_option("--out", unify.out_dir, "Output directory")->required();

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Latent geometry report");
  analyze_cmd->add_option("--embeddings", analyze.embeddings_path, "Embedding JSONL")->required();
  analyze_cmd->add_option("--out", analyze.out_dir, "Output directory")->required();
  analyze_cmd->add_option("--top-k", analyze.top_k, "Dimensions in the correlation table");
  analyze_cmd->add_flag("--normalize-csr", analyze.normalize_csr, "Unit-normalize before CSR");

  SynthBenchOptions bench;
  auto* bench_cmd = app.add_subcommand("synth-bench", "Attack and evaluate on the synthetic oracles");
  add_common(bench_cmd, bench.common);
  bench_cmd->add_option("--out", bench.out_dir, "Output directory")->required();
  bench_cmd->add_option("--samples", bench.samples, "Synthetic samples");
  bench_cmd->add_flag("--force", bench.force, "Replace an existing benchmark");

  SyntheticDatasetCommand synth_data;
  auto* data_cmd = app.add_subcommand("make-synthetic-dataset", "Write a dataset for the synthetic oracles");
  data_cmd->add_option("--out", synth_data.out_path, "Dataset JSONL")->required();
  data_cmd->add_option("--count", synth_data.count, "Samples");
  data_cmd->add_option("--dim", synth_data.dim, "Latent dimension");
  data_cmd->add_option("--lattice-step", synth_data.lattice_step, "Lattice step");
  data_cmd->add_option("--spread", synth_data.spread, "Standard deviation of the query latents");
  data_cmd->add_flag("--with-masks", synth_data.with_masks, "Attach ground-truth masks");
  data_cmd->add_option("--seed", synth_data.seed, "Seed");

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve-synthetic", "Serve the synthetic oracles over NDJSON");
  add_common(serve_cmd, serve.common);
  serve_cmd->add_option("--dataset", serve.dataset_path, "Samples to register for segment requests");
  serve_cmd->add_option("--port", serve.port, "HTTP port (0 picks one); stdio when absent");
  serve_cmd->add_option("--host", serve.host, "HTTP bind address");

  ConformanceCommand conf;
  auto* conf_cmd = app.add_subcommand("conformance", "Check an oracle server against the protocol");
  conf_cmd->add_option("--endpoint", conf.endpoint, "http:URL, cmd:COMMAND or synthetic")->required();
  conf_cmd->add_option("--sample-id", conf.sample_id, "Registered sample for segment checks");
  conf_cmd->add_option("--probe-text", conf.probe_text, "Probe sentence");
  conf_cmd->add_option("--timeout-ms", conf.timeout_ms, "Per-request timeout");
  conf_cmd->add_flag("--skip-encode", conf.skip_encode);
  conf_cmd->add_flag("--skip-segment", conf.skip_segment);
  conf_cmd->add_flag("--skip-embed", conf.skip_embed);
  conf_cmd->add_flag("--skip-judge", conf.skip_judge);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*attack_cmd) return cmd_attack(attack, std::cout, std::cerr);
  if (*eval_cmd) return cmd_eval(eval, std::cout, std::cerr);
  if (*unify_cmd) return cmd_unify(unify, std::cout, std::cerr);
  if (*analyze_cmd) return cmd_analyze(analyze, std::cout, std::cerr);
  if (*bench_cmd) return cmd_synth_bench(bench, std::cout, std::cerr);
  if (*data_cmd) return cmd_make_synthetic_dataset(synth_data, std::cout, std::cerr);
  if (*serve_cmd) return cmd_serve_synthetic(serve, std::cin, std::cout, std::cerr);
  if (*conf_cmd) return cmd_conformance(conf, std::cout, std::cerr);
  return kExitUsage;
}
