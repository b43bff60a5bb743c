#include "latentpara/run_store.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "latentpara/errors.hpp"

namespace latentpara {

using nlohmann::json;
using nlohmann::ordered_json;

std::string timestamp_now() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    try {
      t = static_cast<std::time_t>(std::stoll(epoch));
    } catch (const std::exception&) {
      throw ConfigError(std::string("SOURCE_DATE_EPOCH is not an integer: ") + epoch);
    }
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string tool_version() { return "latentpara " LATENTPARA_VERSION; }

ordered_json manifest_to_json(const RunManifest& m) {
  ordered_json samples = ordered_json::array();
  for (const SampleStatus& s : m.samples) {
    ordered_json row{{"sample_id", s.sample_id},
                     {"status", s.status},
                     {"seed", s.seed},
                     {"original_text", s.original_text}};
    row["original_iou"] = s.has_original_iou ? ordered_json(s.original_iou) : ordered_json(nullptr);
    if (!s.error.empty()) row["error"] = s.error;
    samples.push_back(std::move(row));
  }
  return ordered_json{{"run_id", m.run_id},
                      {"created_at", m.created_at},
                      {"tool_version", m.tool_version},
                      {"global_seed", m.global_seed},
                      {"config", ordered_json::parse(m.config.dump())},
                      {"samples", std::move(samples)}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.global_seed = j.at("global_seed").get<std::uint64_t>();
    m.config = j.at("config");
    for (const json& row : j.at("samples")) {
      SampleStatus s;
      s.sample_id = row.at("sample_id").get<std::string>();
      s.status = row.at("status").get<std::string>();
      s.seed = row.at("seed").get<std::uint64_t>();
      s.original_text = row.at("original_text").get<std::string>();
      if (!row.at("original_iou").is_null()) {
        s.original_iou = row.at("original_iou").get<double>();
        s.has_original_iou = true;
      }
      s.error = row.value("error", std::string{});
      m.samples.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& manifest, bool overwrite) {
  const auto path = run_dir / kManifestFile;
  if (!overwrite && std::filesystem::exists(path)) {
    throw ConfigError("run directory " + run_dir.string() + " already holds a manifest (use --force)");
  }
  std::filesystem::create_directories(run_dir);
  write_file_atomic(path, manifest_to_json(manifest).dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& run_dir) {
  const auto path = run_dir / kManifestFile;
  std::ifstream in(path);
  if (!in) throw ConfigError("no manifest in " + run_dir.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed run manifest " + path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

}  // namespace latentpara
