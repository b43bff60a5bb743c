#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latentpara/oracles.hpp"

namespace latentpara {

/// Desk-scale autoencoder whose "sentences" are lattice points.
///
/// decode rounds every coordinate to the nearest multiple of `step`
/// (ties to even) and renders "L[v1,...,vd]"; encode parses that format
/// back. Nearby latents therefore collapse to identical text, the way a
/// real decoder quantizes. Text that is not in lattice form is encoded to a
/// pseudo-random latent seeded by the text bytes.
class LatticeAutoencoder : public Autoencoder {
 public:
  LatticeAutoencoder(std::size_t dim, double step);

  LatentVector encode(const std::string& text) override;
  std::string decode(const LatentVector& z) override;

  std::size_t dim() const { return dim_; }
  double step() const { return step_; }

  /// Parse "L[a,b,...]"; nullopt when text is not in lattice form.
  static std::optional<std::vector<double>> parse(std::string_view text);

  /// Render already-quantized values.
  static std::string render(std::span<const double> values);

 private:
  std::size_t dim_;
  double step_;
};

/// IoU = exp(-|E(query) - E(x0)|^2 / (2 tau^2)): maximal at the original
/// query and decaying smoothly with latent distance.
///
/// In mask mode the oracle returns a predicted mask instead: the first
/// round(IoU * |m|) set pixels of the ground truth m, in row-major order.
class BowlSegmenter : public Segmenter {
 public:
  BowlSegmenter(std::shared_ptr<Autoencoder> autoencoder, double tau, bool mask_mode = false);

  SegmentationResult segment(const QuerySample& sample, const std::string& query) override;

  double bowl_iou(const QuerySample& sample, const std::string& query);

 private:
  const LatentVector& center(const QuerySample& sample);

  std::shared_ptr<Autoencoder> autoencoder_;
  double tau_;
  bool mask_mode_;
  std::mutex mutex_;
  std::map<std::string, LatentVector> centers_;
};

/// Lattice texts embed to their parsed coordinates; any other text is
/// feature-hashed over whitespace tokens into `hash_dim` signed buckets.
class SyntheticEmbedder : public Embedder {
 public:
  explicit SyntheticEmbedder(std::size_t hash_dim = 64) : hash_dim_(hash_dim) {}
  std::vector<double> embed(const std::string& text) override;

 private:
  std::size_t hash_dim_;
};

/// Scores 5 when the pair is cosine-close under the embedder and passes
/// regex_consistency, otherwise 1.
class StubJudge : public Judge {
 public:
  StubJudge(std::shared_ptr<Embedder> embedder, double cosine_threshold = 0.825,
            std::string terminal_punctuation = ".!?");
  int score(const std::string& original, const std::string& paraphrase) override;

 private:
  std::shared_ptr<Embedder> embedder_;
  double threshold_;
  std::string punctuation_;
};

/// Lattice text for a latent drawn around the origin, never all-zero.
/// Used to build synthetic datasets.
struct SyntheticDatasetOptions {
  std::size_t count = 3;
  std::size_t dim = 16;
  double step = 0.25;
  double spread = 1.0;
  bool with_masks = false;
  std::size_t mask_size = 16;
  std::uint64_t seed = 1;
};

std::vector<QuerySample> make_synthetic_dataset(const SyntheticDatasetOptions& options);

}  // namespace latentpara
