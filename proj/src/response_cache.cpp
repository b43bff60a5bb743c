#include "latentpara/response_cache.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "latentpara/hashing.hpp"

namespace latentpara {

std::optional<double> ResponseCache::find(const std::string& sample_id,
                                          const std::string& text) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find({sample_id, text});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double ResponseCache::insert(const std::string& sample_id, const std::string& text, double iou) {
  std::lock_guard lock(mutex_);
  return entries_.try_emplace({sample_id, text}, iou).first->second;
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void ResponseCache::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cache file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    const auto text = j.at("text").get<std::string>();
    if (j.at("text_sha256").get<std::string>() != sha256_hex(text)) {
      throw std::runtime_error(where + ": text_sha256 does not match text");
    }
    insert(j.at("sample_id").get<std::string>(), text, j.at("iou").get<double>());
  }
}

void ResponseCache::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file " + path.string());
  std::lock_guard lock(mutex_);
  for (const auto& [key, iou] : entries_) {
    nlohmann::json j{{"sample_id", key.first},
                     {"text_sha256", sha256_hex(key.second)},
                     {"text", key.second},
                     {"iou", iou}};
    out << j.dump() << '\n';
  }
}

double cached_evaluate(ResponseCache* cache, Segmenter& segmenter, const QuerySample& sample,
                       const std::string& text) {
  if (cache) {
    if (auto hit = cache->find(sample.sample_id, text)) return *hit;
  }
  const double iou = query_iou(segmenter, sample, text);
  return cache ? cache->insert(sample.sample_id, text, iou) : iou;
}

}  // namespace latentpara
