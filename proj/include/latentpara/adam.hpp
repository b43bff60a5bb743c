#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "latentpara/latent_policy.hpp"
#include "latentpara/ppo.hpp"
#include "latentpara/value_network.hpp"

namespace latentpara {

struct AdamHyperparams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam moments for one parameter group, with its own learning rate.
class AdamGroup {
 public:
  AdamGroup(std::size_t size, double learning_rate, AdamHyperparams hyper = {});

  /// Bias-corrected Adam update of params in place; increments step().
  void step(std::span<double> params, std::span<const double> grads);

  std::int64_t steps() const { return t_; }
  double learning_rate() const { return lr_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

 private:
  double lr_;
  AdamHyperparams hyper_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t t_ = 0;
};

struct LearningRates {
  double mu = 1e-2;
  double lambda_pre = 1e-3;
  double value = 1e-3;
};

/// Optimizer state for the three trainable groups (mu, lambda_pre, psi).
class AdamState {
 public:
  AdamState(std::size_t latent_dim, std::size_t value_params, LearningRates rates,
            AdamHyperparams hyper = {});

  /// One step on every group. The policy is rebuilt from the updated vectors.
  void step(GaussianPolicy& policy, ValueNetwork& net, const Gradients& grads);

  const AdamGroup& mu() const { return mu_; }
  const AdamGroup& lambda_pre() const { return lambda_; }
  const AdamGroup& value() const { return value_; }

 private:
  AdamGroup mu_;
  AdamGroup lambda_;
  AdamGroup value_;
};

}  // namespace latentpara
