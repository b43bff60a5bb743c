#include "latentpara/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "latentpara/errors.hpp"

namespace latentpara {

double compute_reward(double iou) {
  if (!(iou >= 0.0 && iou <= 1.0)) {
    throw std::invalid_argument("compute_reward: IoU " + std::to_string(iou) +
                                " outside [0, 1]");
  }
  return -iou;
}

std::vector<double> normalize_advantages(std::span<const double> rewards,
                                         std::span<const double> baselines, double eps_adv) {
  if (rewards.size() != baselines.size()) {
    throw DimensionMismatch("normalize_advantages: rewards and baselines differ in length");
  }
  if (rewards.empty()) {
    throw std::invalid_argument("normalize_advantages: empty batch");
  }
  const std::size_t n = rewards.size();
  std::vector<double> r(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = rewards[i] - baselines[i];
    mean += r[i];
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double& x : r) {
    x -= mean;
    var += x * x;
  }
  var /= static_cast<double>(n);
  const double denom = std::sqrt(var) + eps_adv;
  if (var == 0.0) {
    std::fill(r.begin(), r.end(), 0.0);
    return r;
  }
  for (double& x : r) x /= denom;
  return r;
}

double importance_ratio(double logp_new, double logp_old) {
  return std::exp(std::clamp(logp_new - logp_old, -kLogRatioClamp, kLogRatioClamp));
}

double clipped_surrogate(double rho, double advantage, double eps_clip) {
  const double clipped = std::clamp(rho, 1.0 - eps_clip, 1.0 + eps_clip);
  return std::min(rho * advantage, clipped * advantage);
}

void ObjectiveWeights::validate() const {
  if (!(lambda_adv >= 0.0)) throw std::invalid_argument("lambda_adv must be >= 0");
  if (!(lambda_sim >= 0.0)) throw std::invalid_argument("lambda_sim must be >= 0");
  if (!(eps_clip > 0.0 && eps_clip < 1.0)) throw std::invalid_argument("eps_clip must be in (0, 1)");
  if (!(eps_adv > 0.0)) throw std::invalid_argument("eps_adv must be > 0");
}

void PpoBatch::validate() const {
  const std::size_t n = z.size();
  if (n == 0) throw std::invalid_argument("PpoBatch: empty batch");
  if (reward.size() != n || logp_old.size() != n || advantage.size() != n) {
    throw DimensionMismatch("PpoBatch: column lengths differ");
  }
}

void evaluate_surrogates(PpoBatch& batch, const GaussianPolicy& policy, double eps_clip) {
  batch.validate();
  const std::size_t n = batch.size();
  batch.logp_new.resize(n);
  batch.ratio.resize(n);
  batch.surrogate.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    batch.logp_new[i] = log_density(policy, batch.z[i]);
    batch.ratio[i] = importance_ratio(batch.logp_new[i], batch.logp_old[i]);
    batch.surrogate[i] = clipped_surrogate(batch.ratio[i], batch.advantage[i], eps_clip);
  }
}

Losses total_objective(const PpoBatch& batch, const ObjectiveWeights& weights,
                       std::span<const double> mu, std::span<const double> z0,
                       std::span<const double> values) {
  const std::size_t n = batch.size();
  if (n == 0) throw std::invalid_argument("total_objective: empty batch");
  if (batch.surrogate.size() != n || batch.reward.size() != n || values.size() != n) {
    throw DimensionMismatch("total_objective: batch columns and values differ in length");
  }
  if (mu.size() != z0.size()) throw DimensionMismatch("total_objective: mu and z0 differ");

  const double inv_n = 1.0 / static_cast<double>(n);
  Losses out;
  double surrogate_sum = 0.0;
  double value_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    surrogate_sum += batch.surrogate[i];
    const double resid = batch.reward[i] - values[i];
    value_sum += resid * resid;
  }
  double dist2 = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double diff = mu[k] - z0[k];
    dist2 += diff * diff;
  }
  out.policy = -weights.lambda_adv * inv_n * surrogate_sum;
  out.value = inv_n * value_sum;
  out.sim = weights.lambda_sim * dist2;
  out.total = out.policy + out.value + out.sim;
  return out;
}

ObjectiveEvaluation compute_gradients(const PpoBatch& batch, const ObjectiveWeights& weights,
                                      const GaussianPolicy& policy, std::span<const double> z0,
                                      const ValueNetwork& net) {
  batch.validate();
  const std::size_t n = batch.size();
  const std::size_t d = policy.dim();
  if (z0.size() != d) throw DimensionMismatch("compute_gradients: z0 and policy differ");
  if (net.input_dim() != d) throw DimensionMismatch("compute_gradients: value net input differs");

  const auto& mu = policy.mean();
  const auto& lam = policy.lambda_pre();
  const auto& sigma = policy.scale();

  ObjectiveEvaluation result;
  Gradients& g = result.gradients;
  g.mu.assign(d, 0.0);
  g.lambda_pre.assign(d, 0.0);
  g.value.assign(net.parameter_count(), 0.0);

  // dsigma/dlambda; zero where the scale floor is active.
  std::vector<double> dsigma(d);
  for (std::size_t k = 0; k < d; ++k) {
    dsigma[k] = softplus(lam[k]) > kMinScale ? softplus_derivative(lam[k]) : 0.0;
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  double surrogate_sum = 0.0;
  double value_sum = 0.0;
  std::vector<double> dlogp_dsigma(d);

  for (std::size_t i = 0; i < n; ++i) {
    const auto z = batch.z[i].span();
    if (z.size() != d) throw DimensionMismatch("compute_gradients: candidate dimension differs");

    const double logp = log_density(policy, z);
    const double log_ratio = logp - batch.logp_old[i];
    const double rho = importance_ratio(logp, batch.logp_old[i]);
    const double adv = batch.advantage[i];
    const double clipped = std::clamp(rho, 1.0 - weights.eps_clip, 1.0 + weights.eps_clip);
    const double unclipped_term = rho * adv;
    const double clipped_term = clipped * adv;
    surrogate_sum += std::min(unclipped_term, clipped_term);

    const bool unclipped_active = unclipped_term <= clipped_term;
    const bool clamp_inactive = std::abs(log_ratio) < kLogRatioClamp;
    if (unclipped_active && clamp_inactive && adv != 0.0) {
      // d(-lambda_adv/n * rho * A)/dlogp
      const double coeff = -weights.lambda_adv * inv_n * adv * rho;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = z[k] - mu[k];
        const double s2 = sigma[k] * sigma[k];
        g.mu[k] += coeff * diff / s2;
        dlogp_dsigma[k] = -1.0 / sigma[k] + diff * diff / (s2 * sigma[k]);
        g.lambda_pre[k] += coeff * dlogp_dsigma[k] * dsigma[k];
      }
    }

    const double v = net.predict(z);
    const double resid = batch.reward[i] - v;
    value_sum += resid * resid;
    net.accumulate_gradient(z, -2.0 * inv_n * resid, g.value);
  }

  double dist2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = mu[k] - z0[k];
    dist2 += diff * diff;
    g.mu[k] += 2.0 * weights.lambda_sim * diff;
  }

  Losses& L = result.losses;
  L.policy = -weights.lambda_adv * inv_n * surrogate_sum;
  L.value = inv_n * value_sum;
  L.sim = weights.lambda_sim * dist2;
  L.total = L.policy + L.value + L.sim;
  return result;
}

}  // namespace latentpara
