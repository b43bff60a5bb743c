#include "latentpara/adam.hpp"

#include <cmath>

#include "latentpara/errors.hpp"

namespace latentpara {

AdamGroup::AdamGroup(std::size_t size, double learning_rate, AdamHyperparams hyper)
    : lr_(learning_rate), hyper_(hyper), m_(size, 0.0), v_(size, 0.0) {}

void AdamGroup::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw DimensionMismatch("AdamGroup::step: parameter/gradient size mismatch");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = hyper_.beta1 * m_[i] + (1.0 - hyper_.beta1) * grads[i];
    v_[i] = hyper_.beta2 * v_[i] + (1.0 - hyper_.beta2) * grads[i] * grads[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + hyper_.eps);
  }
}

AdamState::AdamState(std::size_t latent_dim, std::size_t value_params, LearningRates rates,
                     AdamHyperparams hyper)
    : mu_(latent_dim, rates.mu, hyper),
      lambda_(latent_dim, rates.lambda_pre, hyper),
      value_(value_params, rates.value, hyper) {}

void AdamState::step(GaussianPolicy& policy, ValueNetwork& net, const Gradients& grads) {
  std::vector<double> mu = policy.mean();
  std::vector<double> lam = policy.lambda_pre();
  mu_.step(mu, grads.mu);
  lambda_.step(lam, grads.lambda_pre);
  value_.step(net.mutable_parameters(), grads.value);
  policy = GaussianPolicy(std::move(mu), std::move(lam));
}

}  // namespace latentpara
