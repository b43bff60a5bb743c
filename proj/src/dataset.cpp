#include "latentpara/dataset.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace latentpara {

using nlohmann::json;

json mask_to_json(const BinaryMask& mask) {
  return json{{"w", mask.width()}, {"h", mask.height()}, {"rle", rle_encode(mask)}};
}

BinaryMask mask_from_json(const json& j) {
  const auto runs = j.at("rle").get<std::vector<std::uint64_t>>();
  return rle_decode(j.at("w").get<std::size_t>(), j.at("h").get<std::size_t>(), runs);
}

json sample_to_json(const QuerySample& sample) {
  json j{{"sample_id", sample.sample_id},
         {"image_ref", sample.image_ref},
         {"query", sample.query}};
  if (sample.ground_truth) j["ground_truth"] = mask_to_json(*sample.ground_truth);
  return j;
}

QuerySample sample_from_json(const json& j) {
  QuerySample s;
  s.sample_id = j.at("sample_id").get<std::string>();
  s.image_ref = j.value("image_ref", std::string{});
  s.query = j.at("query").get<std::string>();
  if (auto it = j.find("ground_truth"); it != j.end() && !it->is_null()) {
    s.ground_truth = mask_from_json(*it);
  }
  return s;
}

bool is_valid_sample_id(std::string_view id) {
  if (id.empty() || id.front() == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::vector<QuerySample> parse_dataset(std::istream& in, const std::string& source_name) {
  std::vector<QuerySample> samples;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    QuerySample s;
    try {
      s = sample_from_json(json::parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": malformed sample: " + e.what());
    }
    if (!is_valid_sample_id(s.sample_id)) {
      throw std::runtime_error(where + ": invalid sample_id '" + s.sample_id + "'");
    }
    if (s.query.empty()) throw std::runtime_error(where + ": empty query");
    if (!seen.insert(s.sample_id).second) {
      throw std::runtime_error(where + ": duplicate sample_id '" + s.sample_id + "'");
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<QuerySample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  return parse_dataset(in, path.string());
}

void write_dataset(const std::filesystem::path& path, const std::vector<QuerySample>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset " + path.string());
  for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
}

}  // namespace latentpara
