#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace latentpara {

/// A point in the autoencoder's sentence space. All entries are finite.
class LatentVector {
 public:
  LatentVector() = default;
  explicit LatentVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const LatentVector&, const LatentVector&) = default;

 private:
  std::vector<double> values_;
};

/// Lower bound applied to every scale after the softplus.
inline constexpr double kMinScale = 1e-8;

/// log(1 + exp(x)), evaluated without overflow for large |x|.
double softplus(double x);

/// Derivative of softplus, i.e. the logistic function.
double softplus_derivative(double x);

/// Inverse of softplus for sigma > 0: log(exp(sigma) - 1).
double softplus_inverse(double sigma);

/// Elementwise softplus. Not floored; see GaussianPolicy::scale().
std::vector<double> softplus_scale(std::span<const double> lambda_pre);

/// Diagonal Gaussian over latents, N(mu, diag(sigma^2)) with
/// sigma = max(softplus(lambda_pre), kMinScale).
class GaussianPolicy {
 public:
  GaussianPolicy(std::vector<double> mu, std::vector<double> lambda_pre);

  /// mu = z0 and every sigma_k = sigma_init.
  static GaussianPolicy centered_at(const LatentVector& z0, double sigma_init);

  std::size_t dim() const { return mu_.size(); }
  const std::vector<double>& mean() const { return mu_; }
  const std::vector<double>& lambda_pre() const { return lambda_pre_; }
  const std::vector<double>& scale() const { return sigma_; }

 private:
  std::vector<double> mu_;
  std::vector<double> lambda_pre_;
  std::vector<double> sigma_;
};

/// n draws z_i = mu + sigma * xi_i, xi_i ~ N(0, I); fully determined by seed.
std::vector<LatentVector> sample_candidates(const GaussianPolicy& policy, std::size_t n,
                                            std::uint64_t seed);

/// log N(z; mu, diag(sigma^2)). Throws DimensionMismatch.
double log_density(const GaussianPolicy& policy, std::span<const double> z);
inline double log_density(const GaussianPolicy& policy, const LatentVector& z) {
  return log_density(policy, z.span());
}

}  // namespace latentpara
