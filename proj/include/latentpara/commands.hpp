#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "latentpara/config.hpp"
#include "latentpara/oracles.hpp"

namespace latentpara {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPartial = 2;

/// Flags shared by the subcommands; each set value overrides the config.
struct CommonOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  std::optional<std::string> oracle_encode;
  std::optional<std::string> oracle_segment;
  std::optional<std::string> oracle_embed;
  std::optional<std::string> oracle_judge;
};

/// Config file (or defaults), environment overrides, then flags.
ToolConfig resolve_config(const CommonOptions& options, const std::map<std::string, std::string>& env,
                          const ToolConfig& base = ToolConfig{});

/// Oracles named by the config endpoints. Remote endpoints share one client
/// per distinct address.
struct OracleBundle {
  std::shared_ptr<Autoencoder> autoencoder;
  std::shared_ptr<Segmenter> segmenter;
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<Judge> judge;
};

struct OracleNeeds {
  bool attack = true;  ///< autoencoder and segmenter
  bool eval = true;    ///< embedder and judge
};

/// Build the oracles and ping every remote endpoint; a failed ping throws
/// OracleError.
OracleBundle make_oracles(const ToolConfig& config, OracleNeeds needs);

/// Defaults for the desk-scale benchmark on the synthetic oracles.
ToolConfig synth_bench_config();

struct AttackOptions {
  CommonOptions common;
  std::string dataset_path;
  std::string out_dir;
  std::optional<std::string> run_id;  ///< defaults to the out_dir name
  bool force = false;
};

struct EvalOptions {
  CommonOptions common;
  std::optional<std::string> run_dir;
  std::optional<std::string> candidates_path;
  std::optional<std::string> originals_path;
  std::string out_dir;
};

struct UnifyOptions {
  CommonOptions common;
  /// Run directories or candidate JSONL files.
  std::vector<std::string> inputs;
  std::optional<std::string> originals_path;
  std::string out_dir;
};

struct AnalyzeOptions {
  std::string embeddings_path;
  std::string out_dir;
  std::size_t top_k = 10;
  bool normalize_csr = false;
};

struct SynthBenchOptions {
  CommonOptions common;
  std::string out_dir;
  std::size_t samples = 3;
  bool force = false;
};

struct SyntheticDatasetCommand {
  std::string out_path;
  std::size_t count = 3;
  std::size_t dim = 16;
  double lattice_step = 0.25;
  double spread = 1.0;
  bool with_masks = false;
  std::uint64_t seed = 1;
};

struct ServeOptions {
  CommonOptions common;
  std::optional<std::string> dataset_path;
  std::optional<int> port;  ///< HTTP when set, stdio otherwise
  std::string host = "127.0.0.1";
};

struct ConformanceCommand {
  std::string endpoint;
  std::string sample_id;
  std::string probe_text = "Find the cup.";
  bool skip_encode = false;
  bool skip_segment = false;
  bool skip_embed = false;
  bool skip_judge = false;
  int timeout_ms = 30000;
};

/// Each command reports on `out`/`err` and returns an exit status:
/// 0 success, 1 usage or configuration error, 2 partial data failures.
int cmd_attack(const AttackOptions& options, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);
int cmd_unify(const UnifyOptions& options, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_synth_bench(const SynthBenchOptions& options, std::ostream& out, std::ostream& err);
int cmd_make_synthetic_dataset(const SyntheticDatasetCommand& options, std::ostream& out,
                               std::ostream& err);
int cmd_serve_synthetic(const ServeOptions& options, std::istream& in, std::ostream& out,
                        std::ostream& err);
int cmd_conformance(const ConformanceCommand& options, std::ostream& out, std::ostream& err);

}  // namespace latentpara
