#pragma once

#include <cstdint>
#include <string_view>

namespace bdp {

// Deterministic, platform-stable PRNG: xoshiro256++ seeded via splitmix64.
// The same seed produces the same stream on every platform, which is what
// the reproducibility guarantees of the toolkit rest on. std:: distributions
// are deliberately avoided (their output is implementation-defined).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal();

  double normal(double mean, double stddev);

  // Derives an independent child generator. Used to hand each subsystem
  // (init, split, batching, noise, synth) its own stream from one root seed.
  SeededRng split(std::string_view tag) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

// FNV-1a 64-bit hash; used for stream splitting and config fingerprints.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace bdp
