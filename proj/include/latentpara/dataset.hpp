#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentpara/mask.hpp"

namespace latentpara {

/// One attack target: an image handle, the original query and (optionally)
/// the ground-truth mask. The mask is absent when the segmentation oracle
/// holds the ground truth and answers with an IoU directly.
struct QuerySample {
  std::string sample_id;
  std::string image_ref;
  std::string query;
  std::optional<BinaryMask> ground_truth;
};

/// {"w": ..., "h": ..., "rle": [...]}
nlohmann::json mask_to_json(const BinaryMask& mask);
BinaryMask mask_from_json(const nlohmann::json& j);

nlohmann::json sample_to_json(const QuerySample& sample);
QuerySample sample_from_json(const nlohmann::json& j);

/// Sample ids double as trajectory file names, so they are restricted to
/// [A-Za-z0-9._-] and may not start with a dot.
bool is_valid_sample_id(std::string_view id);

/// Load a JSON-lines dataset. Blank lines are ignored. Throws
/// std::runtime_error naming the line on malformed records, invalid or
/// duplicate sample ids.
std::vector<QuerySample> load_dataset(const std::filesystem::path& path);
std::vector<QuerySample> parse_dataset(std::istream& in, const std::string& source_name);

void write_dataset(const std::filesystem::path& path, const std::vector<QuerySample>& samples);

}  // namespace latentpara
