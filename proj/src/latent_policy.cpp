#include "latentpara/latent_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "latentpara/errors.hpp"
#include "latentpara/random.hpp"

namespace latentpara {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

}  // namespace

LatentVector::LatentVector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "LatentVector");
}

double softplus(double x) {
  // max(x, 0) + log1p(exp(-|x|)) never overflows and keeps full precision
  // in the far negative tail.
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double softplus_derivative(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus_inverse(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("softplus_inverse: sigma must be positive and finite");
  }
  // log(exp(s) - 1) = s + log(1 - exp(-s))
  return sigma + std::log(-std::expm1(-sigma));
}

std::vector<double> softplus_scale(std::span<const double> lambda_pre) {
  std::vector<double> out(lambda_pre.size());
  std::transform(lambda_pre.begin(), lambda_pre.end(), out.begin(),
                 [](double x) { return softplus(x); });
  return out;
}

GaussianPolicy::GaussianPolicy(std::vector<double> mu, std::vector<double> lambda_pre)
    : mu_(std::move(mu)), lambda_pre_(std::move(lambda_pre)) {
  if (mu_.size() != lambda_pre_.size()) {
    throw DimensionMismatch("GaussianPolicy: mu has " + std::to_string(mu_.size()) +
                            " entries, lambda_pre has " + std::to_string(lambda_pre_.size()));
  }
  require_finite(mu_, "GaussianPolicy mu");
  require_finite(lambda_pre_, "GaussianPolicy lambda_pre");
  sigma_ = softplus_scale(lambda_pre_);
  for (double& s : sigma_) s = std::max(s, kMinScale);
}

GaussianPolicy GaussianPolicy::centered_at(const LatentVector& z0, double sigma_init) {
  return GaussianPolicy(z0.values(),
                        std::vector<double>(z0.size(), softplus_inverse(sigma_init)));
}

std::vector<LatentVector> sample_candidates(const GaussianPolicy& policy, std::size_t n,
                                            std::uint64_t seed) {
  Rng rng(seed);
  const auto& mu = policy.mean();
  const auto& sigma = policy.scale();
  std::vector<LatentVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> z(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) {
      z[k] = mu[k] + sigma[k] * rng.normal();
    }
    out.emplace_back(std::move(z));
  }
  return out;
}

double log_density(const GaussianPolicy& policy, std::span<const double> z) {
  if (z.size() != policy.dim()) {
    throw DimensionMismatch("log_density: latent has " + std::to_string(z.size()) +
                            " entries, policy has " + std::to_string(policy.dim()));
  }
  static const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const auto& mu = policy.mean();
  const auto& sigma = policy.scale();
  double total = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double u = (z[k] - mu[k]) / sigma[k];
    total += -std::log(sigma[k]) - kHalfLog2Pi - 0.5 * u * u;
  }
  return total;
}

}  // namespace latentpara
