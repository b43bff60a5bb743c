#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "latentpara/adam.hpp"
#include "latentpara/dataset.hpp"
#include "latentpara/oracles.hpp"
#include "latentpara/ppo.hpp"
#include "latentpara/response_cache.hpp"

namespace latentpara {

struct AttackConfig {
  std::size_t candidates = 16;  ///< n, latents drawn per iteration
  std::size_t iterations = 10;  ///< N
  double sigma_init = 0.1;
  ObjectiveWeights weights;
  LearningRates learning_rates;
  AdamHyperparams adam;
  std::size_t hidden = 64;
  /// Adam steps per sampling round. With 1 the ratio is identically 1 and the
  /// clip never binds; larger values re-evaluate ratios against the frozen
  /// sampling policy on every step.
  std::size_t inner_steps = 1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct CandidateRecord {
  std::string latent_hash;
  std::string text;
  double iou = 0.0;
  double reward = 0.0;
  double logp_old = 0.0;
  double logp_new = 0.0;
  double advantage = 0.0;
  double ratio = 0.0;
  double surrogate = 0.0;
};

struct IterationRecord {
  std::size_t t = 0;
  std::vector<CandidateRecord> candidates;
  std::size_t dropped = 0;  ///< candidates lost to oracle errors
  bool updated = false;     ///< false when too few candidates survived
  std::string mean_text;
  double mean_iou = 0.0;
  Losses losses;
};

struct AttackTrajectory {
  std::string sample_id;
  std::string original_text;
  double original_iou = 0.0;
  bool has_original_iou = false;
  std::uint64_t seed = 0;
  bool complete = false;
  std::string error;
  std::vector<IterationRecord> iterations;
  /// Policy mean when the attack stopped; in memory only, not persisted.
  std::vector<double> final_mean;
};

/// Non-owning view of the oracles an attack talks to.
struct AttackOracles {
  Autoencoder* autoencoder = nullptr;
  Segmenter* segmenter = nullptr;
  ResponseCache* cache = nullptr;
};

/// Run the latent PPO attack on one sample for config.iterations rounds.
///
/// Each round draws config.candidates latents from the current policy,
/// decodes and scores them, takes the configured Adam step(s) on the total
/// objective and then decodes the mean. A candidate whose decode or
/// segmentation fails is dropped; when that leaves fewer than two the update
/// is skipped. Failures outside the candidate loop, or a round where every
/// candidate fails, end the attack with complete == false.
AttackTrajectory run_attack(const QuerySample& sample, const AttackConfig& config,
                            const AttackOracles& oracles);

/// Per-sample seed, independent of dataset order and scheduling.
std::uint64_t sample_seed(std::uint64_t global_seed, std::string_view sample_id);

/// Attack every sample with its own derived seed on up to `parallelism`
/// threads. Results follow dataset order.
std::vector<AttackTrajectory> run_dataset(const std::vector<QuerySample>& dataset,
                                          const AttackConfig& config,
                                          const AttackOracles& oracles, std::size_t parallelism);

}  // namespace latentpara
