#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "latentpara/oracles.hpp"

namespace latentpara {

/// Memoized IoU per (sample_id, exact query bytes). Thread-safe; the first
/// stored value for a key wins.
class ResponseCache {
 public:
  std::optional<double> find(const std::string& sample_id, const std::string& text) const;

  /// Insert unless present; returns the stored value.
  double insert(const std::string& sample_id, const std::string& text, double iou);

  std::size_t size() const;

  /// Merge entries from a JSON-lines file of {sample_id, text_sha256, text, iou}.
  /// Throws std::runtime_error on malformed lines or digest mismatches.
  void load(const std::filesystem::path& path);

  /// Write all entries sorted by key, so identical contents give identical files.
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, double> entries_;
};

/// IoU for `text` on `sample`, consulting and filling the cache. Oracle errors
/// propagate and are not cached. A null cache queries the oracle directly.
double cached_evaluate(ResponseCache* cache, Segmenter& segmenter, const QuerySample& sample,
                       const std::string& text);

}  // namespace latentpara
