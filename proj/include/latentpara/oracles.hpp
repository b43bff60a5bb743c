#pragma once

#include <string>
#include <variant>
#include <vector>

#include "latentpara/dataset.hpp"
#include "latentpara/latent_policy.hpp"
#include "latentpara/mask.hpp"

namespace latentpara {

/// Text autoencoder (E, D). Implementations must be safe to call from
/// several threads at once.
class Autoencoder {
 public:
  virtual ~Autoencoder() = default;
  virtual LatentVector encode(const std::string& text) = 0;
  virtual std::string decode(const LatentVector& z) = 0;
};

/// A segmentation oracle answers with either an IoU (it holds the ground
/// truth) or a predicted mask.
using SegmentationResult = std::variant<double, BinaryMask>;

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual SegmentationResult segment(const QuerySample& sample, const std::string& query) = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
};

/// Paraphrase validity judge, integer score 1..5.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual int score(const std::string& original, const std::string& paraphrase) = 0;
};

/// Checked entry points. Empty text is rejected with std::invalid_argument.
LatentVector encode_text(Autoencoder& autoencoder, const std::string& text);
std::string decode_latent(Autoencoder& autoencoder, const LatentVector& z);
SegmentationResult query_segmentation(Segmenter& segmenter, const QuerySample& sample,
                                      const std::string& query);
std::vector<double> embed_text(Embedder& embedder, const std::string& text);

/// IoU of a segmentation result against the sample's ground truth. A direct
/// IoU outside [0, 1] raises OutOfRangeError; a mask with no ground truth
/// to compare against raises OracleError.
double segmentation_iou(const SegmentationResult& result, const QuerySample& sample);

/// query_segmentation followed by segmentation_iou.
double query_iou(Segmenter& segmenter, const QuerySample& sample, const std::string& query);

}  // namespace latentpara
