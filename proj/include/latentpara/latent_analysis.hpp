#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace latentpara {

/// A sentence embedding with its paraphrase-group label and text length.
struct LabeledEmbedding {
  std::vector<double> vector;
  std::string label;
  double length = 1.0;
};

/// Maps a sentence to its length; defaults to whitespace tokens.
using LengthFunction = std::function<double(std::string_view)>;
LengthFunction whitespace_length();

/// v / |v|. Throws std::domain_error for the zero vector.
std::vector<double> unit_normalized(std::span<const double> v);

/// Sample Pearson correlation. Throws std::domain_error if either series is
/// constant and std::invalid_argument on fewer than 2 points.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson r between coordinate `dim` and the length series, on unit-
/// normalized embeddings unless `normalize` is false.
double pearson_dim_length(std::span<const LabeledEmbedding> embeddings, std::size_t dim,
                          bool normalize = true);

/// pearson_dim_length for every coordinate; constant coordinates give NaN.
std::vector<double> pearson_all_dims(std::span<const LabeledEmbedding> embeddings,
                                     bool normalize = true);

/// Nearest-neighbour recall.
///
/// For each point i whose label has other members S_i, take the |S_i|
/// nearest other points (Euclidean, ties by index) and score the fraction
/// of S_i among them; return the mean over those points. Throws
/// std::invalid_argument when no label has two members.
double nnr(std::span<const LabeledEmbedding> embeddings, bool normalize = true);

/// Cluster-separation ratio: mean distance of points to their label
/// centroid over mean pairwise centroid distance. Raw vectors unless
/// `normalize` is set. Throws std::invalid_argument with fewer than two
/// labels and std::domain_error when all centroids coincide.
double csr(std::span<const LabeledEmbedding> embeddings, bool normalize = false);

}  // namespace latentpara
