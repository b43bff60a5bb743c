#include "latentpara/analysis_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "latentpara/errors.hpp"

namespace latentpara {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<LabeledEmbedding> load_embeddings(const std::filesystem::path& path,
                                              const LengthFunction& length_of) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<LabeledEmbedding> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const json j = json::parse(line, nullptr, false);
    if (!j.is_object()) throw ConfigError(where + ": not a JSON object");
    LabeledEmbedding e;
    try {
      e.vector = j.at("vector").get<std::vector<double>>();
      const json& label = j.at("label");
      e.label = label.is_string() ? label.get<std::string>() : label.dump();
      if (j.contains("length")) {
        e.length = j.at("length").get<double>();
      } else if (j.contains("text")) {
        e.length = length_of(j.at("text").get<std::string>());
      } else {
        throw ConfigError("needs a length or a text field");
      }
    } catch (const std::exception& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
    if (e.vector.empty()) throw ConfigError(where + ": empty vector");
    if (!std::all_of(e.vector.begin(), e.vector.end(), [](double x) { return std::isfinite(x); })) {
      throw ConfigError(where + ": non-finite vector entry");
    }
    out.push_back(std::move(e));
  }
  return out;
}

GeometryReport analyze_geometry(const std::vector<LabeledEmbedding>& embeddings, bool normalize_csr) {
  GeometryReport report;
  report.points = embeddings.size();
  std::set<std::string> labels;
  for (const auto& e : embeddings) labels.insert(e.label);
  report.labels = labels.size();
  report.csr_normalized = normalize_csr;
  report.nnr = nnr(embeddings);
  try {
    report.csr = csr(embeddings, normalize_csr);
  } catch (const std::exception& e) {
    report.warnings.push_back(std::string("csr unavailable: ") + e.what());
  }
  try {
    report.per_dim_r = pearson_all_dims(embeddings);
  } catch (const std::exception& e) {
    report.warnings.push_back(std::string("per-dimension correlation unavailable: ") + e.what());
  }
  return report;
}

ordered_json geometry_to_json(const GeometryReport& r) {
  ordered_json j{{"points", r.points}, {"labels", r.labels}, {"nnr", r.nnr}};
  j["csr"] = r.csr ? ordered_json(*r.csr) : ordered_json(nullptr);
  j["csr_normalized"] = r.csr_normalized;
  if (r.per_dim_r) {
    ordered_json dims = ordered_json::array();
    for (double x : *r.per_dim_r) dims.push_back(std::isnan(x) ? ordered_json(nullptr) : ordered_json(x));
    j["per_dim_r"] = std::move(dims);
  } else {
    j["per_dim_r"] = nullptr;
  }
  j["warnings"] = r.warnings;
  return j;
}

std::string top_dimensions_csv(const std::vector<double>& per_dim_r, std::size_t k) {
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < per_dim_r.size(); ++i) {
    if (!std::isnan(per_dim_r[i])) dims.push_back(i);
  }
  std::stable_sort(dims.begin(), dims.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(per_dim_r[a]) > std::abs(per_dim_r[b]);
  });
  dims.resize(std::min(k, dims.size()));
  std::string out = "rank,dim,r,abs_r\n";
  char row[128];
  for (std::size_t rank = 0; rank < dims.size(); ++rank) {
    const double r = per_dim_r[dims[rank]];
    std::snprintf(row, sizeof row, "%zu,%zu,%.6f,%.6f\n", rank + 1, dims[rank], r, std::abs(r));
    out += row;
  }
  return out;
}

}  // namespace latentpara
