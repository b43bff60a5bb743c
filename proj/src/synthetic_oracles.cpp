#include "latentpara/synthetic_oracles.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "latentpara/errors.hpp"
#include "latentpara/hashing.hpp"
#include "latentpara/random.hpp"
#include "latentpara/text_checks.hpp"

namespace latentpara {

LatticeAutoencoder::LatticeAutoencoder(std::size_t dim, double step) : dim_(dim), step_(step) {
  if (dim == 0) throw std::invalid_argument("LatticeAutoencoder: dim must be positive");
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("LatticeAutoencoder: step must be positive");
  }
}

std::optional<std::vector<double>> LatticeAutoencoder::parse(std::string_view text) {
  if (text.size() < 3 || text.substr(0, 2) != "L[" || text.back() != ']') return std::nullopt;
  std::string_view body = text.substr(2, text.size() - 3);
  std::vector<double> values;
  if (body.empty()) return values;
  while (true) {
    const auto comma = body.find(',');
    const std::string_view token = body.substr(0, comma);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) {
      return std::nullopt;
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return values;
}

std::string LatticeAutoencoder::render(std::span<const double> values) {
  std::string out = "L[";
  char buf[64];
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out.push_back(',');
    double v = values[k];
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string_view token(buf, static_cast<std::size_t>(ptr - buf));
    out.append(token);
    if (token.find_first_of(".e") == std::string_view::npos) out.append(".0");
  }
  out.push_back(']');
  return out;
}

LatentVector LatticeAutoencoder::encode(const std::string& text) {
  if (auto parsed = parse(text)) {
    if (parsed->size() != dim_) {
      throw OracleError("lattice text has " + std::to_string(parsed->size()) +
                        " coordinates, autoencoder dimension is " + std::to_string(dim_));
    }
    return LatentVector(std::move(*parsed));
  }
  Rng rng(fnv1a64(text));
  std::vector<double> z(dim_);
  for (double& x : z) x = rng.normal();
  return LatentVector(std::move(z));
}

std::string LatticeAutoencoder::decode(const LatentVector& z) {
  if (z.size() != dim_) {
    throw DimensionMismatch("LatticeAutoencoder::decode: latent has " + std::to_string(z.size()) +
                            " entries, expected " + std::to_string(dim_));
  }
  std::vector<double> q(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    // nearbyint honours the default round-half-to-even mode.
    q[k] = std::nearbyint(z[k] / step_) * step_;
  }
  return render(q);
}

BowlSegmenter::BowlSegmenter(std::shared_ptr<Autoencoder> autoencoder, double tau, bool mask_mode)
    : autoencoder_(std::move(autoencoder)), tau_(tau), mask_mode_(mask_mode) {
  if (!autoencoder_) throw std::invalid_argument("BowlSegmenter: null autoencoder");
  if (!(tau > 0.0)) throw std::invalid_argument("BowlSegmenter: tau must be positive");
}

const LatentVector& BowlSegmenter::center(const QuerySample& sample) {
  std::lock_guard lock(mutex_);
  auto it = centers_.find(sample.sample_id);
  if (it == centers_.end()) {
    it = centers_.emplace(sample.sample_id, autoencoder_->encode(sample.query)).first;
  }
  return it->second;
}

double BowlSegmenter::bowl_iou(const QuerySample& sample, const std::string& query) {
  const LatentVector& c = center(sample);
  const LatentVector z = autoencoder_->encode(query);
  if (z.size() != c.size()) throw DimensionMismatch("BowlSegmenter: latent dimensions differ");
  double dist2 = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double diff = z[k] - c[k];
    dist2 += diff * diff;
  }
  return std::exp(-dist2 / (2.0 * tau_ * tau_));
}

SegmentationResult BowlSegmenter::segment(const QuerySample& sample, const std::string& query) {
  const double iou = bowl_iou(sample, query);
  if (!mask_mode_) return iou;
  if (!sample.ground_truth) {
    throw OracleError("BowlSegmenter: mask mode needs a ground-truth mask for " +
                      sample.sample_id);
  }
  const BinaryMask& gt = *sample.ground_truth;
  const auto keep = static_cast<std::size_t>(
      std::llround(iou * static_cast<double>(gt.set_count())));
  std::vector<std::uint8_t> bits(gt.pixel_count(), 0);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < bits.size() && kept < keep; ++i) {
    if (gt.bits()[i]) {
      bits[i] = 1;
      ++kept;
    }
  }
  return BinaryMask(gt.width(), gt.height(), std::move(bits));
}

std::vector<double> SyntheticEmbedder::embed(const std::string& text) {
  if (auto parsed = LatticeAutoencoder::parse(text)) return *parsed;
  std::vector<double> v(hash_dim_, 0.0);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto begin = text.find_first_not_of(" \t\r\n", start);
    if (begin == std::string::npos) break;
    auto end = text.find_first_of(" \t\r\n", begin);
    if (end == std::string::npos) end = text.size();
    const std::uint64_t h = fnv1a64(std::string_view(text).substr(begin, end - begin));
    v[h % hash_dim_] += (h >> 63) ? -1.0 : 1.0;
    start = end;
  }
  return v;
}

StubJudge::StubJudge(std::shared_ptr<Embedder> embedder, double cosine_threshold,
                     std::string terminal_punctuation)
    : embedder_(std::move(embedder)),
      threshold_(cosine_threshold),
      punctuation_(std::move(terminal_punctuation)) {
  if (!embedder_) throw std::invalid_argument("StubJudge: null embedder");
}

int StubJudge::score(const std::string& original, const std::string& paraphrase) {
  if (!regex_consistency(original, paraphrase, punctuation_)) return 1;
  const auto a = embedder_->embed(original);
  const auto b = embedder_->embed(paraphrase);
  if (a.size() != b.size()) return 1;
  try {
    return cosine_similarity(a, b) > threshold_ ? 5 : 1;
  } catch (const std::domain_error&) {
    return 1;
  }
}

std::vector<QuerySample> make_synthetic_dataset(const SyntheticDatasetOptions& options) {
  Rng rng(options.seed);
  std::vector<QuerySample> samples;
  for (std::size_t s = 0; s < options.count; ++s) {
    std::vector<double> z(options.dim);
    bool nonzero = false;
    while (!nonzero) {
      for (double& x : z) {
        x = std::nearbyint(options.spread * rng.normal() / options.step) * options.step;
        nonzero = nonzero || x != 0.0;
      }
    }
    QuerySample sample;
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%03zu", s);
    sample.sample_id = id;
    sample.image_ref = std::string("synthetic://") + id;
    sample.query = LatticeAutoencoder::render(z);
    if (options.with_masks) {
      const std::size_t n = options.mask_size;
      BinaryMask gt(n, n);
      const std::size_t x0 = rng.next_u64() % (n / 2);
      const std::size_t y0 = rng.next_u64() % (n / 2);
      const std::size_t w = 1 + rng.next_u64() % (n / 2);
      const std::size_t h = 1 + rng.next_u64() % (n / 2);
      for (std::size_t y = y0; y < y0 + h; ++y) {
        for (std::size_t x = x0; x < x0 + w; ++x) gt.set(x, y, true);
      }
      sample.ground_truth = std::move(gt);
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace latentpara
