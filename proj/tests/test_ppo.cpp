#include <cmath>
#include <cstring>
#include <numeric>

#include <gtest/gtest.h>

#include "latentpara/adam.hpp"
#include "latentpara/errors.hpp"
#include "latentpara/ppo.hpp"
#include "objective_oracle.hpp"

namespace lp = latentpara;
using lp::testing::ObjectiveInstance;

TEST(Reward, IsNegatedIou) {
  EXPECT_EQ(lp::compute_reward(0.0), 0.0);
  EXPECT_EQ(lp::compute_reward(1.0), -1.0);
  EXPECT_EQ(lp::compute_reward(0.7), -0.7);
}

TEST(Reward, RejectsOutOfRange) {
  EXPECT_THROW(lp::compute_reward(-0.01), std::invalid_argument);
  EXPECT_THROW(lp::compute_reward(1.01), std::invalid_argument);
  EXPECT_THROW(lp::compute_reward(NAN), std::invalid_argument);
}

TEST(Advantages, ZeroVarianceGivesZeros) {
  const std::vector<double> r{-0.5, -0.5, -0.5}, v{0, 0, 0};
  for (double eps : {1e-8, 1.0}) {
    for (double a : lp::normalize_advantages(r, v, eps)) EXPECT_EQ(a, 0.0);
  }
}

TEST(Advantages, PopulationStd) {
  const auto a = lp::normalize_advantages(std::vector<double>{1, 2, 3}, std::vector<double>{0, 0, 0}, 1e-8);
  EXPECT_NEAR(a[0], -1.224744, 1e-5);
  EXPECT_NEAR(a[1], 0.0, 1e-12);
  EXPECT_NEAR(a[2], 1.224744, 1e-5);
}

TEST(Advantages, SingleElement) {
  const auto a = lp::normalize_advantages(std::vector<double>{5}, std::vector<double>{0}, 1e-8);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], 0.0);
}

TEST(Advantages, MeanZeroAndStdProperty) {
  lp::Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 30;
    std::vector<double> r(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = -rng.uniform();
      v[i] = 0.3 * rng.normal();
    }
    const double eps = 1e-8;
    const auto a = lp::normalize_advantages(r, v, eps);
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = r[i] - v[i];
    const double m = std::accumulate(res.begin(), res.end(), 0.0) / n;
    double var = 0.0;
    for (double x : res) var += (x - m) * (x - m);
    const double sd = std::sqrt(var / n);
    const double am = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double avar = 0.0;
    for (double x : a) avar += (x - am) * (x - am);
    EXPECT_LT(std::abs(am), 1e-9);
    EXPECT_NEAR(std::sqrt(avar / n), sd / (sd + eps), 1e-6);
  }
}

TEST(Advantages, LengthMismatchThrows) {
  EXPECT_THROW(lp::normalize_advantages(std::vector<double>{1, 2}, std::vector<double>{0}, 1e-8),
               lp::DimensionMismatch);
}

TEST(ImportanceRatio, Examples) {
  EXPECT_EQ(lp::importance_ratio(-3.2, -3.2), 1.0);
  EXPECT_NEAR(lp::importance_ratio(std::log(2.0) - 1.0, -1.0), 2.0, 1e-15);
  EXPECT_EQ(lp::importance_ratio(100.0, 0.0), std::exp(30.0));
  EXPECT_NEAR(lp::importance_ratio(100.0, 0.0), 1.0686e13, 1e9);
  EXPECT_EQ(lp::importance_ratio(0.0, 100.0), std::exp(-30.0));
}

TEST(ClippedSurrogate, Examples) {
  EXPECT_DOUBLE_EQ(lp::clipped_surrogate(2.0, 1.0, 0.2), 1.2);
  EXPECT_DOUBLE_EQ(lp::clipped_surrogate(0.5, -1.0, 0.2), -0.8);
  for (double a : {-3.0, -0.25, 0.0, 0.5, 7.0}) EXPECT_EQ(lp::clipped_surrogate(1.0, a, 0.2), a);
}

TEST(ClippedSurrogate, GridBounds) {
  for (int ri = 1; ri <= 30; ++ri) {
    const double rho = ri / 10.0;
    for (int ai = -20; ai <= 20; ++ai) {
      const double a = ai / 10.0;
      for (double eps : {0.1, 0.2, 0.3, 0.5}) {
        const double l = lp::clipped_surrogate(rho, a, eps);
        EXPECT_LE(l, rho * a) << rho << " " << a << " " << eps;
        // The clip caps the gain for positive advantages; negative ones stay pessimistic.
        if (a >= 0.0) {
          EXPECT_LE(l, (1.0 + eps) * a + 1e-15);
        } else if (rho > 1.0 + eps) {
          EXPECT_EQ(l, rho * a);
        }
      }
    }
  }
}

TEST(ValueNetwork, ZeroWeightsPredictZero) {
  lp::ValueNetwork net(5, 4);
  EXPECT_EQ(lp::value_predict(net, lp::LatentVector({1, 2, 3, 4, 5})), 0.0);
}

TEST(ValueNetwork, ConstantHead) {
  std::vector<double> p(lp::ValueNetwork::parameter_count(3, 2), 0.0);
  for (std::size_t i = 0; i < 6; ++i) p[i] = 0.3 * (i + 1);  // W1 nonzero
  p.back() = 0.5;
  const auto net = lp::ValueNetwork::from_parameters(3, 2, p);
  EXPECT_EQ(lp::value_predict(net, lp::LatentVector({1, -2, 3})), 0.5);
  EXPECT_EQ(lp::value_predict(net, lp::LatentVector({0, 0, 0})), 0.5);
}

TEST(ValueNetwork, RandomFixtureMatchesForwardOracle) {
  const auto net = lp::ValueNetwork::initialized(4, 3, 7);
  const auto psi = net.parameters();
  lp::Rng rng(70);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> z(4);
    for (double& x : z) x = rng.normal();
    long double v = psi[3 * 4 + 2 * 3];
    for (std::size_t j = 0; j < 3; ++j) {
      long double pre = psi[12 + j];
      for (std::size_t k = 0; k < 4; ++k) pre += static_cast<long double>(psi[j * 4 + k]) * z[k];
      v += static_cast<long double>(psi[12 + 3 + j]) * std::tanh(pre);
    }
    EXPECT_NEAR(net.predict(z), static_cast<double>(v), 1e-10);
  }
}

TEST(ValueNetwork, InitializationIsSeededAndBounded) {
  const auto a = lp::ValueNetwork::initialized(4, 3, 7);
  const auto b = lp::ValueNetwork::initialized(4, 3, 7);
  EXPECT_TRUE(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
  for (double w : a.w1()) EXPECT_LE(std::abs(w), 0.5);
  for (double w : a.w2()) EXPECT_LE(std::abs(w), 1.0 / std::sqrt(3.0));
}

TEST(ValueNetwork, DimensionMismatchThrows) {
  lp::ValueNetwork net(3, 2);
  EXPECT_THROW(net.predict(std::vector<double>{1.0}), lp::DimensionMismatch);
}

namespace {

lp::PpoBatch surrogate_batch(const std::vector<double>& surrogate, const std::vector<double>& reward) {
  lp::PpoBatch b;
  for (std::size_t i = 0; i < surrogate.size(); ++i) b.z.emplace_back(std::vector<double>{0.0});
  b.reward = reward;
  b.logp_old.assign(surrogate.size(), 0.0);
  b.logp_new.assign(surrogate.size(), 0.0);
  b.advantage.assign(surrogate.size(), 0.0);
  b.ratio.assign(surrogate.size(), 1.0);
  b.surrogate = surrogate;
  return b;
}

}  // namespace

TEST(TotalObjective, HandExample) {
  lp::ObjectiveWeights w;
  w.lambda_adv = 0.5;
  w.lambda_sim = 1.0;
  const auto b = surrogate_batch({1.0, 3.0}, {-0.2, -0.4});
  const auto l = lp::total_objective(b, w, std::vector<double>{0.5}, std::vector<double>{0.0},
                                     std::vector<double>{0.0, 0.0});
  EXPECT_NEAR(l.policy, -1.0, 1e-15);
  EXPECT_NEAR(l.value, 0.1, 1e-15);
  EXPECT_NEAR(l.sim, 0.25, 1e-15);
  EXPECT_NEAR(l.total, -0.65, 1e-15);
}

TEST(TotalObjective, SimVanishesAtZ0) {
  const auto b = surrogate_batch({0.3}, {-0.1});
  const auto l = lp::total_objective(b, {}, std::vector<double>{1.5, -2.0}, std::vector<double>{1.5, -2.0},
                                     std::vector<double>{0.0});
  EXPECT_EQ(l.sim, 0.0);
}

TEST(TotalObjective, OnlySimWhenOtherTermsVanish) {
  lp::ObjectiveWeights w;
  w.lambda_sim = 2.0;
  const auto b = surrogate_batch({0.0, 0.0}, {-0.2, -0.9});
  const auto l = lp::total_objective(b, w, std::vector<double>{1.0}, std::vector<double>{0.0},
                                     std::vector<double>{-0.2, -0.9});
  EXPECT_EQ(l.total, l.sim);
  EXPECT_EQ(l.sim, 2.0);
}

TEST(Gradients, ZeroAdvantageLeavesOnlyValueAndSim) {
  auto in = lp::testing::random_instance(5, 3, 4, 2);
  std::fill(in.advantage.begin(), in.advantage.end(), 0.0);
  const lp::GaussianPolicy policy(in.mu, in.lambda_pre);
  const auto net = lp::ValueNetwork::from_parameters(in.d, in.h, in.psi);
  const auto eval = lp::compute_gradients(lp::testing::batch_of(in), in.weights, policy, in.z0, net);
  for (std::size_t k = 0; k < in.d; ++k) {
    EXPECT_NEAR(eval.gradients.mu[k], 2.0 * in.weights.lambda_sim * (in.mu[k] - in.z0[k]), 1e-14);
    EXPECT_EQ(eval.gradients.lambda_pre[k], 0.0);
  }
}

TEST(Gradients, SimGradientVanishesAtZ0) {
  auto in = lp::testing::random_instance(6, 3, 4, 2);
  in.z0 = in.mu;
  std::fill(in.advantage.begin(), in.advantage.end(), 0.0);
  const lp::GaussianPolicy policy(in.mu, in.lambda_pre);
  const auto net = lp::ValueNetwork::from_parameters(in.d, in.h, in.psi);
  const auto eval = lp::compute_gradients(lp::testing::batch_of(in), in.weights, policy, in.z0, net);
  for (double g : eval.gradients.mu) EXPECT_EQ(g, 0.0);
}

TEST(Gradients, LossesAgreeWithTotalObjective) {
  const auto in = lp::testing::random_instance(8, 4, 5, 3);
  const lp::GaussianPolicy policy(in.mu, in.lambda_pre);
  const auto net = lp::ValueNetwork::from_parameters(in.d, in.h, in.psi);
  const auto eval = lp::compute_gradients(lp::testing::batch_of(in), in.weights, policy, in.z0, net);
  EXPECT_NEAR(eval.losses.total,
              static_cast<double>(lp::testing::reference_objective(in, in.mu, in.lambda_pre, in.psi)), 1e-12);
}

TEST(Gradients, SmallInstanceMatchesFiniteDifferences) {
  const auto in = lp::testing::random_instance(11, 3, 4, 2);
  const auto check = lp::testing::check_gradients(in);
  EXPECT_EQ(check.coordinates, 3u + 3u + lp::ValueNetwork::parameter_count(3, 2));
  EXPECT_LT(check.max_relative_error, 1e-4);
}

TEST(Gradients, RandomInstancesMatchFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 1 + seed % 8, n = 1 + (seed / 8) % 8, h = 1 + seed % 4;
    const auto in = lp::testing::random_instance(1000 + seed, d, n, h);
    EXPECT_LT(lp::testing::check_gradients(in).max_relative_error, 1e-4) << "seed " << seed;
  }
}

TEST(Gradients, FlooredScaleHasNoLambdaGradient) {
  auto in = lp::testing::random_instance(12, 2, 3, 2);
  in.lambda_pre = {-40.0, -40.0};
  const lp::GaussianPolicy policy(in.mu, in.lambda_pre);
  const auto net = lp::ValueNetwork::from_parameters(in.d, in.h, in.psi);
  const auto eval = lp::compute_gradients(lp::testing::batch_of(in), in.weights, policy, in.z0, net);
  for (double g : eval.gradients.lambda_pre) EXPECT_EQ(g, 0.0);
}

TEST(Adam, ZeroGradientKeepsParameters) {
  lp::AdamGroup g(3, 1e-2);
  std::vector<double> p{1.0, -2.0, 0.5};
  const auto before = p;
  g.step(p, std::vector<double>{0.0, 0.0, 0.0});
  EXPECT_EQ(p, before);
  EXPECT_EQ(g.steps(), 1);
}

TEST(Adam, FirstStepMagnitude) {
  lp::AdamGroup g(1, 1e-3);
  std::vector<double> p{0.0};
  g.step(p, std::vector<double>{1.0});
  EXPECT_NEAR(p[0], -1e-3 / (1.0 + 1e-8), 1e-18);
}

TEST(Adam, FirstStepFollowsNegativeSign) {
  lp::AdamGroup g(4, 0.05);
  std::vector<double> p{0, 0, 0, 0};
  const std::vector<double> grad{3.0, -0.001, 1e-4, -50.0};
  g.step(p, grad);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(std::signbit(p[i]), !std::signbit(grad[i])) << i;
}

TEST(Adam, Deterministic) {
  auto run = [] {
    lp::AdamGroup g(3, 0.01);
    std::vector<double> p{0.1, 0.2, 0.3};
    for (int i = 0; i < 10; ++i) g.step(p, std::vector<double>{std::sin(i), std::cos(i), 0.1 * i});
    return p;
  };
  const auto a = run(), b = run();
  EXPECT_EQ(std::memcmp(a.data(), b.data(), 3 * sizeof(double)), 0);
}

TEST(Adam, SeparateLearningRatesPerGroup) {
  lp::LearningRates rates{0.1, 0.01, 0.001};
  lp::AdamState state(2, lp::ValueNetwork::parameter_count(2, 1), rates);
  lp::GaussianPolicy policy({0.0, 0.0}, {0.0, 0.0});
  lp::ValueNetwork net(2, 1);
  lp::Gradients g;
  g.mu = {1.0, 1.0};
  g.lambda_pre = {1.0, 1.0};
  g.value.assign(net.parameter_count(), 1.0);
  state.step(policy, net, g);
  EXPECT_NEAR(policy.mean()[0], -0.1, 1e-9);
  EXPECT_NEAR(policy.lambda_pre()[0], -0.01, 1e-9);
  EXPECT_NEAR(net.parameters()[0], -0.001, 1e-9);
  EXPECT_EQ(policy.scale()[0], lp::softplus(policy.lambda_pre()[0]));
  EXPECT_EQ(state.mu().steps(), 1);
  EXPECT_EQ(state.value().steps(), 1);
}

TEST(Adam, QuadraticObjectiveDecreasesMonotonically) {
  // Fixed batch with rewards from a quadratic bowl; repeated steps on the
  // same batch should almost always lower the total objective.
  const std::size_t d = 4, n = 8, h = 3;
  lp::Rng rng(21);
  std::vector<double> z0(d);
  for (double& x : z0) x = rng.normal();
  lp::GaussianPolicy policy = lp::GaussianPolicy::centered_at(lp::LatentVector(z0), 0.3);
  lp::ValueNetwork net = lp::ValueNetwork::initialized(d, h, 4);
  lp::PpoBatch batch;
  const auto zs = lp::sample_candidates(policy, n, 77);
  for (const auto& z : zs) {
    double dist = 0.0;
    for (std::size_t k = 0; k < d; ++k) dist += (z[k] - z0[k]) * (z[k] - z0[k]);
    batch.z.push_back(z);
    batch.reward.push_back(-std::exp(-dist / 2.0));
    batch.logp_old.push_back(lp::log_density(policy, z));
  }
  std::vector<double> baselines;
  for (const auto& z : zs) baselines.push_back(net.predict(z.span()));
  lp::ObjectiveWeights w;
  w.lambda_sim = 0.1;
  batch.advantage = lp::normalize_advantages(batch.reward, baselines, w.eps_adv);
  batch.logp_new = batch.logp_old;
  batch.ratio.assign(n, 1.0);
  batch.surrogate.assign(n, 0.0);

  lp::AdamState adam(d, net.parameter_count(), {1e-3, 1e-3, 1e-3});
  double previous = lp::compute_gradients(batch, w, policy, z0, net).losses.total;
  int decreases = 0;
  for (int step = 0; step < 50; ++step) {
    const auto eval = lp::compute_gradients(batch, w, policy, z0, net);
    adam.step(policy, net, eval.gradients);
    const double now = lp::compute_gradients(batch, w, policy, z0, net).losses.total;
    if (now < previous) ++decreases;
    previous = now;
  }
  EXPECT_GE(decreases, 45);
}

TEST(Weights, Validation) {
  lp::ObjectiveWeights w;
  EXPECT_NO_THROW(w.validate());
  w.eps_clip = 1.0;
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w = {};
  w.lambda_sim = -1.0;
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w = {};
  w.eps_adv = 0.0;
  EXPECT_THROW(w.validate(), std::invalid_argument);
}
