#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentpara/config.hpp"

namespace latentpara {

inline constexpr std::string_view kManifestFile = "manifest.json";

struct SampleStatus {
  std::string sample_id;
  std::string status;  ///< "complete" or "failed"
  std::string original_text;
  double original_iou = 0.0;
  bool has_original_iou = false;
  std::uint64_t seed = 0;
  std::string error;

  friend bool operator==(const SampleStatus&, const SampleStatus&) = default;
};

struct RunManifest {
  std::string run_id;
  std::string created_at;
  std::string tool_version;
  std::uint64_t global_seed = 0;
  nlohmann::json config;  ///< snapshot written by config_to_json
  std::vector<SampleStatus> samples;
};

/// UTC timestamp; taken from SOURCE_DATE_EPOCH when set so reruns can be
/// byte-identical.
std::string timestamp_now();

std::string tool_version();

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Throws ConfigError if a manifest already exists and overwrite is false.
void write_manifest(const std::filesystem::path& run_dir, const RunManifest& manifest, bool overwrite);
RunManifest read_manifest(const std::filesystem::path& run_dir);

/// Write `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace latentpara
