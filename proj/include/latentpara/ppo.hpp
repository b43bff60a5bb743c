#pragma once

#include <span>
#include <vector>

#include "latentpara/latent_policy.hpp"
#include "latentpara/value_network.hpp"

namespace latentpara {

/// Reward for one candidate: the negated IoU. Throws std::invalid_argument
/// when iou is outside [0, 1].
double compute_reward(double iou);

/// Residuals r_i = R_i - V_i standardized with the population std:
/// (r_i - mean r) / (std r + eps_adv). A zero-variance batch maps to zeros.
std::vector<double> normalize_advantages(std::span<const double> rewards,
                                         std::span<const double> baselines, double eps_adv);

/// Exponent range applied before exponentiating a log-ratio.
inline constexpr double kLogRatioClamp = 30.0;

/// exp(clamp(logp_new - logp_old, -30, 30)).
double importance_ratio(double logp_new, double logp_old);

/// min(rho * A, clip(rho, 1 - eps, 1 + eps) * A).
double clipped_surrogate(double rho, double advantage, double eps_clip);

inline double value_predict(const ValueNetwork& net, const LatentVector& z) {
  return net.predict(z.span());
}

struct ObjectiveWeights {
  double lambda_adv = 1.0;
  double lambda_sim = 0.1;
  double eps_clip = 0.2;
  double eps_adv = 1e-8;

  /// Throws std::invalid_argument when a weight is out of its domain.
  void validate() const;
};

/// One sampling round. z, reward, logp_old and advantage are fixed when the
/// batch is drawn; logp_new, ratio and surrogate depend on the current policy
/// and are refreshed by evaluate_surrogates().
struct PpoBatch {
  std::vector<LatentVector> z;
  std::vector<double> reward;
  std::vector<double> logp_old;
  std::vector<double> logp_new;
  std::vector<double> advantage;
  std::vector<double> ratio;
  std::vector<double> surrogate;

  std::size_t size() const { return z.size(); }

  /// Throws std::invalid_argument unless every column has size() >= 1 entries.
  void validate() const;
};

/// Fill logp_new, ratio and surrogate of batch from the given policy.
void evaluate_surrogates(PpoBatch& batch, const GaussianPolicy& policy, double eps_clip);

struct Losses {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double sim = 0.0;
};

/// L_policy = -lambda_adv * mean(surrogate), L_value = mean((R - V)^2),
/// L_sim = lambda_sim * |mu - z0|^2, total = sum of the three.
Losses total_objective(const PpoBatch& batch, const ObjectiveWeights& weights,
                       std::span<const double> mu, std::span<const double> z0,
                       std::span<const double> values);

/// Gradients of the total objective, one vector per parameter group.
struct Gradients {
  std::vector<double> mu;
  std::vector<double> lambda_pre;
  std::vector<double> value;
};

struct ObjectiveEvaluation {
  Losses losses;
  Gradients gradients;
};

/// Analytic gradients of the total objective at (policy, net).
///
/// Only z, reward, logp_old and advantage are read from the batch; the ratio
/// and surrogate are recomputed from the policy so this is a pure function of
/// the trainable parameters. Advantages are constants. The policy term
/// contributes only where the unclipped branch attains the min and the
/// log-ratio clamp is inactive.
ObjectiveEvaluation compute_gradients(const PpoBatch& batch, const ObjectiveWeights& weights,
                                      const GaussianPolicy& policy, std::span<const double> z0,
                                      const ValueNetwork& net);

}  // namespace latentpara
