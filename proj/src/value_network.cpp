#include "latentpara/value_network.hpp"

#include <cmath>
#include <string>

#include "latentpara/errors.hpp"
#include "latentpara/random.hpp"

namespace latentpara {

ValueNetwork::ValueNetwork(std::size_t input_dim, std::size_t hidden)
    : input_dim_(input_dim),
      hidden_(hidden),
      params_(parameter_count(input_dim, hidden), 0.0) {}

ValueNetwork ValueNetwork::initialized(std::size_t input_dim, std::size_t hidden,
                                       std::uint64_t seed) {
  ValueNetwork net(input_dim, hidden);
  Rng rng(seed);
  const double a1 = input_dim > 0 ? 1.0 / std::sqrt(static_cast<double>(input_dim)) : 0.0;
  const double a2 = hidden > 0 ? 1.0 / std::sqrt(static_cast<double>(hidden)) : 0.0;
  auto p = net.mutable_parameters();
  const std::size_t nw1 = hidden * input_dim;
  for (std::size_t i = 0; i < nw1; ++i) p[i] = a1 * (2.0 * rng.uniform() - 1.0);
  for (std::size_t j = 0; j < hidden; ++j) p[nw1 + hidden + j] = a2 * (2.0 * rng.uniform() - 1.0);
  return net;
}

ValueNetwork ValueNetwork::from_parameters(std::size_t input_dim, std::size_t hidden,
                                           std::span<const double> flat) {
  ValueNetwork net(input_dim, hidden);
  if (flat.size() != net.parameter_count()) {
    throw DimensionMismatch("ValueNetwork: expected " + std::to_string(net.parameter_count()) +
                            " parameters, got " + std::to_string(flat.size()));
  }
  std::copy(flat.begin(), flat.end(), net.params_.begin());
  return net;
}

std::vector<double> ValueNetwork::hidden_activations(std::span<const double> z) const {
  if (z.size() != input_dim_) {
    throw DimensionMismatch("ValueNetwork: input has " + std::to_string(z.size()) +
                            " entries, expected " + std::to_string(input_dim_));
  }
  const auto weights = w1();
  const auto bias = b1();
  std::vector<double> a(hidden_);
  for (std::size_t j = 0; j < hidden_; ++j) {
    double pre = bias[j];
    const double* row = weights.data() + j * input_dim_;
    for (std::size_t k = 0; k < input_dim_; ++k) pre += row[k] * z[k];
    a[j] = std::tanh(pre);
  }
  return a;
}

double ValueNetwork::predict(std::span<const double> z) const {
  const auto a = hidden_activations(z);
  const auto head = w2();
  double v = b2();
  for (std::size_t j = 0; j < hidden_; ++j) v += head[j] * a[j];
  return v;
}

void ValueNetwork::accumulate_gradient(std::span<const double> z, double scale,
                                       std::span<double> grad) const {
  if (grad.size() != params_.size()) {
    throw DimensionMismatch("ValueNetwork: gradient buffer has wrong size");
  }
  const auto a = hidden_activations(z);
  const auto head = w2();
  const std::size_t nw1 = hidden_ * input_dim_;
  for (std::size_t j = 0; j < hidden_; ++j) {
    const double back = scale * head[j] * (1.0 - a[j] * a[j]);
    double* row = grad.data() + j * input_dim_;
    for (std::size_t k = 0; k < input_dim_; ++k) row[k] += back * z[k];
    grad[nw1 + j] += back;
    grad[nw1 + hidden_ + j] += scale * a[j];
  }
  grad.back() += scale;
}

}  // namespace latentpara
