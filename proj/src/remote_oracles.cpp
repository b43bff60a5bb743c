#include <cmath>
#include <stdexcept>

#include "latentpara/errors.hpp"
#include "latentpara/oracles.hpp"
#include "latentpara/protocol.hpp"

namespace latentpara {

using nlohmann::json;

namespace {

std::vector<double> embedding_field(const json& response, std::string_view op) {
  auto it = response.find("embedding");
  if (it == response.end() || !it->is_array()) {
    throw ProtocolError(std::string(op) + ": response lacks 'embedding' array");
  }
  std::vector<double> v;
  v.reserve(it->size());
  for (const auto& x : *it) {
    if (!x.is_number()) throw ProtocolError(std::string(op) + ": non-numeric embedding entry");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw ProtocolError(std::string(op) + ": non-finite embedding entry");
    v.push_back(d);
  }
  if (v.empty()) throw ProtocolError(std::string(op) + ": empty embedding");
  return v;
}

void require_text(const std::string& text, const char* what) {
  if (text.empty()) throw std::invalid_argument(std::string(what) + ": empty text");
}

}  // namespace

LatentVector encode_text(Autoencoder& autoencoder, const std::string& text) {
  require_text(text, "encode_text");
  return autoencoder.encode(text);
}

std::string decode_latent(Autoencoder& autoencoder, const LatentVector& z) {
  return autoencoder.decode(z);
}

SegmentationResult query_segmentation(Segmenter& segmenter, const QuerySample& sample,
                                      const std::string& query) {
  require_text(query, "query_segmentation");
  return segmenter.segment(sample, query);
}

std::vector<double> embed_text(Embedder& embedder, const std::string& text) {
  require_text(text, "embed_text");
  return embedder.embed(text);
}

double segmentation_iou(const SegmentationResult& result, const QuerySample& sample) {
  if (const double* iou = std::get_if<double>(&result)) {
    if (!(*iou >= 0.0 && *iou <= 1.0)) {
      throw OutOfRangeError("segmentation oracle returned IoU " + std::to_string(*iou) +
                            " for " + sample.sample_id);
    }
    return *iou;
  }
  if (!sample.ground_truth) {
    throw OracleError("segmentation oracle returned a mask but sample " + sample.sample_id +
                      " has no ground truth");
  }
  return mask_iou(std::get<BinaryMask>(result), *sample.ground_truth);
}

double query_iou(Segmenter& segmenter, const QuerySample& sample, const std::string& query) {
  return segmentation_iou(query_segmentation(segmenter, sample, query), sample);
}

LatentVector RemoteAutoencoder::encode(const std::string& text) {
  auto z = embedding_field(client_->call("encode", {{"text", text}}), "encode");
  std::size_t expected = 0;
  if (!dim_.compare_exchange_strong(expected, z.size()) && expected != z.size()) {
    throw DimensionDriftError("encode: embedding size changed from " + std::to_string(expected) +
                              " to " + std::to_string(z.size()));
  }
  return LatentVector(std::move(z));
}

std::string RemoteAutoencoder::decode(const LatentVector& z) {
  const std::size_t d = dim_.load();
  if (d != 0 && z.size() != d) {
    throw DimensionMismatch("decode: latent has " + std::to_string(z.size()) +
                            " entries, encoder dimension is " + std::to_string(d));
  }
  const json response = client_->call("decode", {{"embedding", z.values()}});
  auto it = response.find("text");
  if (it == response.end() || !it->is_string()) {
    throw ProtocolError("decode: response lacks string 'text'");
  }
  return it->get<std::string>();
}

SegmentationResult RemoteSegmenter::segment(const QuerySample& sample, const std::string& query) {
  const json response = client_->call(
      "segment", {{"sample_id", sample.sample_id}, {"image_ref", sample.image_ref}, {"text", query}});
  if (auto it = response.find("iou"); it != response.end()) {
    if (!it->is_number()) throw ProtocolError("segment: 'iou' is not a number");
    const double iou = it->get<double>();
    if (!(iou >= 0.0 && iou <= 1.0)) {
      throw OutOfRangeError("segment: IoU " + it->dump() + " outside [0, 1]");
    }
    return iou;
  }
  if (auto it = response.find("mask"); it != response.end()) {
    try {
      return mask_from_json(*it);
    } catch (const std::exception& e) {
      throw ProtocolError(std::string("segment: malformed mask: ") + e.what());
    }
  }
  throw ProtocolError("segment: response carries neither 'iou' nor 'mask'");
}

std::vector<double> RemoteEmbedder::embed(const std::string& text) {
  return embedding_field(client_->call("embed", {{"text", text}}), "embed");
}

int RemoteJudge::score(const std::string& original, const std::string& paraphrase) {
  const json response = client_->call("judge", {{"original", original}, {"text", paraphrase}});
  auto it = response.find("score");
  if (it == response.end()) throw ProtocolError("judge: response lacks 'score'");
  return parse_judge_score(*it);
}

}  // namespace latentpara
