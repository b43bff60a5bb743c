#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace latentpara {

/// Scalar baseline V(z) = w2 . tanh(W1 z + b1) + b2.
///
/// Flat parameter layout (used by the optimizer and gradients):
/// [W1 row-major (hidden x input), b1 (hidden), w2 (hidden), b2].
class ValueNetwork {
 public:
  /// All-zero weights.
  ValueNetwork(std::size_t input_dim, std::size_t hidden);

  /// W1 ~ U(-1/sqrt(d), 1/sqrt(d)), w2 ~ U(-1/sqrt(h), 1/sqrt(h)), zero biases.
  static ValueNetwork initialized(std::size_t input_dim, std::size_t hidden, std::uint64_t seed);

  static ValueNetwork from_parameters(std::size_t input_dim, std::size_t hidden,
                                      std::span<const double> flat);

  static std::size_t parameter_count(std::size_t input_dim, std::size_t hidden) {
    return hidden * input_dim + 2 * hidden + 1;
  }

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::span<const double> parameters() const { return params_; }

  std::span<const double> w1() const { return {params_.data(), hidden_ * input_dim_}; }
  std::span<const double> b1() const { return {params_.data() + hidden_ * input_dim_, hidden_}; }
  std::span<const double> w2() const {
    return {params_.data() + hidden_ * input_dim_ + hidden_, hidden_};
  }
  double b2() const { return params_.back(); }

  std::span<double> mutable_parameters() { return params_; }

  /// Throws DimensionMismatch.
  double predict(std::span<const double> z) const;

  /// Hidden activations tanh(W1 z + b1), kept for backpropagation.
  std::vector<double> hidden_activations(std::span<const double> z) const;

  /// Accumulate scale * dV/dpsi into grad (same flat layout).
  void accumulate_gradient(std::span<const double> z, double scale, std::span<double> grad) const;

 private:
  std::size_t input_dim_;
  std::size_t hidden_;
  std::vector<double> params_;
};

}  // namespace latentpara
