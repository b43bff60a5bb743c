#include "latentpara/latent_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "latentpara/errors.hpp"
#include "latentpara/text_checks.hpp"

namespace latentpara {

LengthFunction whitespace_length() {
  return [](std::string_view text) { return static_cast<double>(whitespace_token_count(text)); };
}

std::vector<double> unit_normalized(std::span<const double> v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 == 0.0) throw std::domain_error("unit_normalized: zero vector");
  const double norm = std::sqrt(norm2);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("pearson: series differ in length");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::domain_error("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::size_t common_dim(std::span<const LabeledEmbedding> e) {
  if (e.empty()) return 0;
  const std::size_t d = e.front().vector.size();
  for (const auto& x : e) {
    if (x.vector.size() != d) throw DimensionMismatch("embeddings have differing dimensions");
  }
  return d;
}

std::vector<std::vector<double>> vectors_of(std::span<const LabeledEmbedding> e, bool normalize) {
  std::vector<std::vector<double>> out;
  out.reserve(e.size());
  for (const auto& x : e) out.push_back(normalize ? unit_normalized(x.vector) : x.vector);
  return out;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double pearson_dim_length(std::span<const LabeledEmbedding> embeddings, std::size_t dim,
                          bool normalize) {
  const std::size_t d = common_dim(embeddings);
  if (dim >= d) throw std::out_of_range("pearson_dim_length: dimension out of range");
  std::vector<double> coord, lengths;
  for (const auto& e : embeddings) {
    coord.push_back(normalize ? unit_normalized(e.vector)[dim] : e.vector[dim]);
    lengths.push_back(e.length);
  }
  return pearson(coord, lengths);
}

std::vector<double> pearson_all_dims(std::span<const LabeledEmbedding> embeddings, bool normalize) {
  const std::size_t d = common_dim(embeddings);
  const auto vecs = vectors_of(embeddings, normalize);
  std::vector<double> lengths;
  for (const auto& e : embeddings) lengths.push_back(e.length);
  std::vector<double> out(d);
  std::vector<double> coord(vecs.size());
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < vecs.size(); ++i) coord[i] = vecs[i][k];
    try {
      out[k] = pearson(coord, lengths);
    } catch (const std::domain_error&) {
      out[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

double nnr(std::span<const LabeledEmbedding> embeddings, bool normalize) {
  if (embeddings.size() < 2) throw std::invalid_argument("nnr: need at least 2 points");
  common_dim(embeddings);
  const auto vecs = vectors_of(embeddings, normalize);
  const std::size_t n = vecs.size();

  std::map<std::string, std::size_t> label_size;
  for (const auto& e : embeddings) ++label_size[e.label];

  double total = 0.0;
  std::size_t eligible = 0;
  std::vector<std::pair<double, std::size_t>> neighbours;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = label_size[embeddings[i].label] - 1;
    if (k == 0) continue;
    neighbours.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) neighbours.emplace_back(euclidean(vecs[i], vecs[j]), j);
    }
    // (distance, index) ordering breaks ties by index.
    std::partial_sort(neighbours.begin(), neighbours.begin() + static_cast<std::ptrdiff_t>(k),
                      neighbours.end());
    std::size_t hits = 0;
    for (std::size_t r = 0; r < k; ++r) {
      if (embeddings[neighbours[r].second].label == embeddings[i].label) ++hits;
    }
    total += static_cast<double>(hits) / static_cast<double>(k);
    ++eligible;
  }
  if (eligible == 0) throw std::invalid_argument("nnr: no label has two or more members");
  return total / static_cast<double>(eligible);
}

double csr(std::span<const LabeledEmbedding> embeddings, bool normalize) {
  const std::size_t d = common_dim(embeddings);
  const auto vecs = vectors_of(embeddings, normalize);

  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < embeddings.size(); ++i) members[embeddings[i].label].push_back(i);
  if (members.size() < 2) throw std::invalid_argument("csr: need at least 2 labels");

  std::map<std::string, std::vector<double>> centroid;
  for (const auto& [label, idx] : members) {
    std::vector<double> c(d, 0.0);
    for (std::size_t i : idx) {
      for (std::size_t k = 0; k < d; ++k) c[k] += vecs[i][k];
    }
    for (double& x : c) x /= static_cast<double>(idx.size());
    centroid.emplace(label, std::move(c));
  }

  double intra = 0.0;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    intra += euclidean(vecs[i], centroid.at(embeddings[i].label));
  }
  intra /= static_cast<double>(vecs.size());

  double inter = 0.0;
  std::size_t pairs = 0;
  for (auto a = centroid.begin(); a != centroid.end(); ++a) {
    for (auto b = std::next(a); b != centroid.end(); ++b) {
      inter += euclidean(a->second, b->second);
      ++pairs;
    }
  }
  inter /= static_cast<double>(pairs);
  if (inter == 0.0) throw std::domain_error("csr: all centroids coincide");
  return intra / inter;
}

}  // namespace latentpara
