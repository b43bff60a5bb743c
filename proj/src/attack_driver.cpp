#include "latentpara/attack_driver.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

#include "latentpara/errors.hpp"
#include "latentpara/hashing.hpp"
#include "latentpara/random.hpp"

namespace latentpara {

void AttackConfig::validate() const {
  if (candidates < 1) throw std::invalid_argument("attack: candidates (n) must be >= 1");
  if (iterations < 1) throw std::invalid_argument("attack: iterations (N) must be >= 1");
  if (inner_steps < 1) throw std::invalid_argument("attack: inner_steps must be >= 1");
  if (!(sigma_init > 0.0)) throw std::invalid_argument("attack: sigma_init must be > 0");
  if (hidden < 1) throw std::invalid_argument("attack: hidden width must be >= 1");
  if (!(learning_rates.mu >= 0 && learning_rates.lambda_pre >= 0 && learning_rates.value >= 0)) {
    throw std::invalid_argument("attack: learning rates must be >= 0");
  }
  weights.validate();
}

namespace {

struct Evaluated {
  LatentVector z;
  std::string text;
  double iou;
};

}  // namespace

AttackTrajectory run_attack(const QuerySample& sample, const AttackConfig& config,
                            const AttackOracles& oracles) {
  config.validate();
  if (!oracles.autoencoder || !oracles.segmenter) {
    throw std::invalid_argument("run_attack: autoencoder and segmenter are required");
  }
  Autoencoder& ae = *oracles.autoencoder;
  Segmenter& seg = *oracles.segmenter;

  AttackTrajectory traj;
  traj.sample_id = sample.sample_id;
  traj.original_text = sample.query;
  traj.seed = config.seed;

  LatentVector z0;
  try {
    z0 = encode_text(ae, sample.query);
    traj.original_iou = cached_evaluate(oracles.cache, seg, sample, sample.query);
    traj.has_original_iou = true;
  } catch (const OracleError& e) {
    traj.error = std::string("original query: ") + e.what();
    return traj;
  }

  const std::size_t d = z0.size();
  GaussianPolicy policy = GaussianPolicy::centered_at(z0, config.sigma_init);
  ValueNetwork net = ValueNetwork::initialized(d, config.hidden, derive_seed(config.seed, "value"));
  AdamState adam(d, net.parameter_count(), config.learning_rates, config.adam);

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    IterationRecord record;
    record.t = t;

    const auto draws = sample_candidates(policy, config.candidates, derive_seed(config.seed, t));
    std::vector<Evaluated> survivors;
    survivors.reserve(draws.size());
    for (const auto& z : draws) {
      try {
        std::string text = decode_latent(ae, z);
        const double iou = cached_evaluate(oracles.cache, seg, sample, text);
        survivors.push_back({z, std::move(text), iou});
      } catch (const OracleError&) {
        ++record.dropped;
      } catch (const std::invalid_argument&) {
        // e.g. an empty decode
        ++record.dropped;
      }
    }
    if (survivors.empty()) {
      traj.final_mean = policy.mean();
      traj.error = "iteration " + std::to_string(t) + ": every candidate failed";
      return traj;
    }

    PpoBatch batch;
    std::vector<double> baselines;
    for (const auto& s : survivors) {
      batch.z.push_back(s.z);
      batch.reward.push_back(compute_reward(s.iou));
      batch.logp_old.push_back(log_density(policy, s.z));
      baselines.push_back(net.predict(s.z.span()));
    }
    batch.advantage = normalize_advantages(batch.reward, baselines, config.weights.eps_adv);
    // Ratios against the sampling policy itself, before any update.
    evaluate_surrogates(batch, policy, config.weights.eps_clip);
    record.losses = total_objective(batch, config.weights, policy.mean(), z0.span(), baselines);

    record.updated = !(record.dropped > 0 && survivors.size() < 2);
    if (record.updated) {
      for (std::size_t step = 0; step < config.inner_steps; ++step) {
        const auto eval = compute_gradients(batch, config.weights, policy, z0.span(), net);
        adam.step(policy, net, eval.gradients);
      }
    }

    for (std::size_t i = 0; i < survivors.size(); ++i) {
      CandidateRecord c;
      c.latent_hash = latent_fingerprint(survivors[i].z.span());
      c.text = std::move(survivors[i].text);
      c.iou = survivors[i].iou;
      c.reward = batch.reward[i];
      c.logp_old = batch.logp_old[i];
      c.logp_new = batch.logp_new[i];
      c.advantage = batch.advantage[i];
      c.ratio = batch.ratio[i];
      c.surrogate = batch.surrogate[i];
      record.candidates.push_back(std::move(c));
    }

    try {
      record.mean_text = decode_latent(ae, LatentVector(policy.mean()));
      record.mean_iou = cached_evaluate(oracles.cache, seg, sample, record.mean_text);
    } catch (const std::exception& e) {
      traj.final_mean = policy.mean();
      traj.error = "iteration " + std::to_string(t) + ": decoding the mean failed: " + e.what();
      return traj;
    }
    traj.iterations.push_back(std::move(record));
  }
  traj.final_mean = policy.mean();
  traj.complete = true;
  return traj;
}

std::uint64_t sample_seed(std::uint64_t global_seed, std::string_view sample_id) {
  return derive_seed(global_seed, sample_id);
}

std::vector<AttackTrajectory> run_dataset(const std::vector<QuerySample>& dataset,
                                          const AttackConfig& config,
                                          const AttackOracles& oracles, std::size_t parallelism) {
  config.validate();
  std::vector<AttackTrajectory> results(dataset.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < dataset.size(); i = next++) {
      const QuerySample& sample = dataset[i];
      AttackConfig local = config;
      local.seed = sample_seed(config.seed, sample.sample_id);
      try {
        results[i] = run_attack(sample, local, oracles);
      } catch (const std::exception& e) {
        AttackTrajectory failed;
        failed.sample_id = sample.sample_id;
        failed.original_text = sample.query;
        failed.seed = local.seed;
        failed.error = e.what();
        results[i] = std::move(failed);
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, dataset.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace latentpara
