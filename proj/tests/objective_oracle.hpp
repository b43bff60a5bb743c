#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "latentpara/latent_policy.hpp"
#include "latentpara/ppo.hpp"
#include "latentpara/random.hpp"
#include "latentpara/value_network.hpp"

namespace latentpara::testing {

/// A self-contained instance of the three-term objective with frozen
/// samples, rewards, old log-densities and advantages.
struct ObjectiveInstance {
  std::size_t d = 0, n = 0, h = 0;
  std::vector<std::vector<double>> z;
  std::vector<double> reward, logp_old, advantage;
  std::vector<double> mu, lambda_pre, psi, z0;
  ObjectiveWeights weights;
};

/// Objective written out from the formulas in long double; it shares no
/// code with the library beyond the parameter layout of the value net.
inline long double reference_objective(const ObjectiveInstance& in, const std::vector<double>& mu,
                                       const std::vector<double>& lambda_pre,
                                       const std::vector<double>& psi) {
  using ld = long double;
  const ld log2pi = std::log(2.0L * std::numbers::pi_v<ld>);
  std::vector<ld> sigma(in.d);
  for (std::size_t k = 0; k < in.d; ++k) {
    const ld x = lambda_pre[k];
    const ld sp = std::max(x, 0.0L) + std::log1p(std::exp(-std::abs(x)));
    sigma[k] = std::max(sp, static_cast<ld>(kMinScale));
  }
  ld surrogate_sum = 0.0L, value_sum = 0.0L;
  for (std::size_t i = 0; i < in.n; ++i) {
    ld logp = 0.0L;
    for (std::size_t k = 0; k < in.d; ++k) {
      const ld u = (in.z[i][k] - static_cast<ld>(mu[k])) / sigma[k];
      logp += -std::log(sigma[k]) - 0.5L * log2pi - 0.5L * u * u;
    }
    const ld diff = std::clamp(logp - static_cast<ld>(in.logp_old[i]), -30.0L, 30.0L);
    const ld rho = std::exp(diff);
    const ld a = in.advantage[i];
    const ld eps = in.weights.eps_clip;
    const ld clipped = std::clamp(rho, 1.0L - eps, 1.0L + eps);
    surrogate_sum += std::min(rho * a, clipped * a);

    // V(z) = w2 . tanh(W1 z + b1) + b2 with psi = [W1 (h x d), b1, w2, b2].
    ld v = psi[in.h * in.d + 2 * in.h];
    for (std::size_t j = 0; j < in.h; ++j) {
      ld pre = psi[in.h * in.d + j];
      for (std::size_t k = 0; k < in.d; ++k) pre += static_cast<ld>(psi[j * in.d + k]) * in.z[i][k];
      v += static_cast<ld>(psi[in.h * in.d + in.h + j]) * std::tanh(pre);
    }
    const ld r = static_cast<ld>(in.reward[i]) - v;
    value_sum += r * r;
  }
  ld sim = 0.0L;
  for (std::size_t k = 0; k < in.d; ++k) {
    const ld dk = static_cast<ld>(mu[k]) - in.z0[k];
    sim += dk * dk;
  }
  const ld nn = static_cast<ld>(in.n);
  return -static_cast<ld>(in.weights.lambda_adv) * surrogate_sum / nn + value_sum / nn +
         static_cast<ld>(in.weights.lambda_sim) * sim;
}

/// Random instance with sizes d, n, h. Old log-densities are the current
/// ones shifted by N(0, 0.3^2) so ratios spread over both clip branches.
/// Instances with a ratio within `kink_margin` of a clip boundary are
/// redrawn, since the objective is not differentiable there.
inline ObjectiveInstance random_instance(std::uint64_t seed, std::size_t d, std::size_t n, std::size_t h,
                                         double kink_margin = 1e-3) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    ObjectiveInstance in;
    in.d = d;
    in.n = n;
    in.h = h;
    in.weights.lambda_adv = 0.5 + rng.uniform();
    in.weights.lambda_sim = rng.uniform();
    in.weights.eps_clip = 0.1 + 0.2 * rng.uniform();
    for (std::size_t k = 0; k < d; ++k) {
      in.mu.push_back(rng.normal());
      in.lambda_pre.push_back(-1.5 + 2.0 * rng.uniform());
      in.z0.push_back(in.mu.back() + 0.5 * rng.normal());
    }
    const GaussianPolicy policy(in.mu, in.lambda_pre);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> zi(d);
      for (std::size_t k = 0; k < d; ++k) zi[k] = in.mu[k] + policy.scale()[k] * rng.normal();
      in.z.push_back(zi);
      in.reward.push_back(-rng.uniform());
      in.logp_old.push_back(log_density(policy, zi) + 0.3 * rng.normal());
      in.advantage.push_back(rng.normal());
    }
    const std::size_t p = h * d + 2 * h + 1;
    for (std::size_t j = 0; j < p; ++j) in.psi.push_back(0.7 * rng.normal());

    bool near_kink = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double rho = importance_ratio(log_density(policy, in.z[i]), in.logp_old[i]);
      const double e = in.weights.eps_clip;
      if (std::abs(rho - (1.0 - e)) < kink_margin || std::abs(rho - (1.0 + e)) < kink_margin) near_kink = true;
    }
    if (!near_kink) return in;
  }
}

inline PpoBatch batch_of(const ObjectiveInstance& in) {
  PpoBatch b;
  for (std::size_t i = 0; i < in.n; ++i) b.z.emplace_back(in.z[i]);
  b.reward = in.reward;
  b.logp_old = in.logp_old;
  b.advantage = in.advantage;
  b.logp_new.assign(in.n, 0.0);
  b.ratio.assign(in.n, 1.0);
  b.surrogate.assign(in.n, 0.0);
  return b;
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

/// Compare compute_gradients against central differences (step h) of the
/// reference objective for every coordinate of mu, lambda_pre and psi.
inline GradientCheck check_gradients(const ObjectiveInstance& in, double step = 1e-5) {
  const GaussianPolicy policy(in.mu, in.lambda_pre);
  const ValueNetwork net = ValueNetwork::from_parameters(in.d, in.h, in.psi);
  const auto eval = compute_gradients(batch_of(in), in.weights, policy, in.z0, net);
  GradientCheck result;
  std::vector<double> mu = in.mu, lam = in.lambda_pre, psi = in.psi;
  auto probe = [&](std::vector<double>& target, std::size_t idx, double analytic) {
    const double base = target[idx];
    target[idx] = base + step;
    const long double up = reference_objective(in, mu, lam, psi);
    target[idx] = base - step;
    const long double down = reference_objective(in, mu, lam, psi);
    target[idx] = base;
    const double numeric = static_cast<double>((up - down) / (2.0L * step));
    result.max_relative_error = std::max(result.max_relative_error, relative_error(analytic, numeric));
    ++result.coordinates;
  };
  for (std::size_t k = 0; k < in.d; ++k) probe(mu, k, eval.gradients.mu[k]);
  for (std::size_t k = 0; k < in.d; ++k) probe(lam, k, eval.gradients.lambda_pre[k]);
  for (std::size_t j = 0; j < psi.size(); ++j) probe(psi, j, eval.gradients.value[j]);
  return result;
}

}  // namespace latentpara::testing
