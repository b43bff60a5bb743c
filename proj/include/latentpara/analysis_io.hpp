#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentpara/latent_analysis.hpp"

namespace latentpara {

/// JSONL of {vector, label, length} or {vector, label, text}; with text,
/// the length comes from `length_of`. Throws ConfigError naming the line on
/// malformed input.
std::vector<LabeledEmbedding> load_embeddings(const std::filesystem::path& path,
                                              const LengthFunction& length_of = whitespace_length());

struct GeometryReport {
  std::size_t points = 0;
  std::size_t labels = 0;
  double nnr = 0.0;
  std::optional<double> csr;             ///< absent with fewer than two labels
  std::optional<std::vector<double>> per_dim_r;  ///< absent when lengths are constant
  bool csr_normalized = false;
  std::vector<std::string> warnings;
};

/// nnr errors propagate; csr and per-dimension correlations degrade to
/// absent values with a warning.
GeometryReport analyze_geometry(const std::vector<LabeledEmbedding>& embeddings, bool normalize_csr);

nlohmann::ordered_json geometry_to_json(const GeometryReport& report);

/// "rank,dim,r,abs_r" for the k dimensions with the largest |r|
/// (ties by dimension index; NaN entries skipped).
std::string top_dimensions_csv(const std::vector<double>& per_dim_r, std::size_t k);

}  // namespace latentpara
