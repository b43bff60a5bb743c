#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace latentpara {

/// Seeded generator with a portable normal sampler.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not; uniforms and normals are therefore derived here so
/// a seed reproduces the same draws with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derive an independent stream seed from a parent seed and a tag.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

}  // namespace latentpara
