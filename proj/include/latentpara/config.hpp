#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "latentpara/attack_driver.hpp"
#include "latentpara/eval_protocol.hpp"

namespace latentpara {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::string_view kEnvPrefix = "LATENTPARA_";

struct OracleEndpoints {
  std::string encode = "synthetic";
  std::string segment = "synthetic";
  std::string embed = "synthetic";
  std::string judge = "synthetic";
  int timeout_ms = 30000;
  int max_concurrency = 4;
};

/// Parameters of the bundled desk-scale oracles.
struct SyntheticOracleConfig {
  std::size_t dim = 16;
  double lattice_step = 0.25;
  double tau = 1.0;
  bool mask_mode = false;
  std::size_t hash_dim = 64;
};

struct EvalSettings {
  EvalConfig filters;
  /// "means": the decoded mean of every iteration; "all": also every
  /// sampled candidate.
  std::string candidate_pool = "means";
  std::string attack_label = "latent_ppo";
};

struct RunSettings {
  std::size_t parallelism = 1;
  /// Optional IoU cache file, loaded before and saved after an attack.
  std::string cache_path;
};

struct ToolConfig {
  int schema_version = kConfigSchemaVersion;
  AttackConfig attack;
  OracleEndpoints oracles;
  SyntheticOracleConfig synthetic;
  EvalSettings eval;
  RunSettings run;
};

nlohmann::ordered_json config_to_json(const ToolConfig& config);

/// Overlay `j` on `base`. Unknown keys, type mismatches and a wrong
/// schema_version raise ConfigError.
ToolConfig config_from_json(const nlohmann::json& j, const ToolConfig& base = ToolConfig{});

/// Apply LATENTPARA_<SECTION>__<KEY>=value overrides (nesting separated by
/// a double underscore, keys upper-cased). Values are parsed as JSON when
/// possible and taken as strings otherwise. Unknown keys raise ConfigError.
void apply_env_overrides(nlohmann::json& j, const std::map<std::string, std::string>& env);

/// Snapshot of LATENTPARA_* variables from the process environment.
std::map<std::string, std::string> environment_overrides();

/// Parse a config file (or take `base` when `path` is empty) and apply
/// environment overrides.
ToolConfig load_config(const std::optional<std::filesystem::path>& path,
                       const std::map<std::string, std::string>& env,
                       const ToolConfig& base = ToolConfig{});

}  // namespace latentpara
