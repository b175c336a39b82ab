#pragma once

#include <cstdint>
#include <initializer_list>

namespace jocomco {

// Deterministic generators with a pinned algorithm. Everything that realizes a
// matrix or makes a random decision in the simulator goes through these, so a
// seed in a packet header regenerates the exact same coefficients at the sink
// and reruns produce byte-identical output.

// splitmix64 step; also used to derive child seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t& state);

// Collapse a master seed plus a list of salts (trial index, node id, stage tag,
// ...) into one child seed. Order-sensitive.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> salts);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_unit();
  // Standard normal via the Marsaglia polar method (no libm distribution
  // objects: their algorithms are not pinned by the standard).
  double next_gaussian();
  // +1 or -1 with equal probability.
  double next_rademacher();
  bool next_bernoulli(double p);
  // Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace jocomco
