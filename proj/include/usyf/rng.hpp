#pragma once

#include <cstdint>
#include <initializer_list>

namespace usyf {

// splitmix64 step; also used to derive child seeds from a root seed.
uint64_t splitmix64(uint64_t& state);

// Deterministic seed derivation: hashes the root seed together with a path of
// tags so every subsystem (data, augmentation, init, shuffling) gets an
// independent stream that depends only on (root, path).
uint64_t derive_seed(uint64_t root, std::initializer_list<uint64_t> path);

// Counter-free random stream. All distributions are implemented on top of the
// raw 64-bit output so draws are reproducible across platforms for a given
// seed, independent of any standard-library distribution internals.
class RngStream {
 public:
  explicit RngStream(uint64_t seed);

  uint64_t next_u64();
  // Unbiased-enough integer in [0, n), n >= 1 (fixed-point multiply).
  uint64_t uniform_int(uint64_t n);
  // Uniform double in [0, 1).
  double uniform();
  // Uniform double in [lo, hi).
  double uniform_range(double lo, double hi);
  // Standard normal via Box-Muller; consumes exactly two raw draws.
  double normal();
  // Random sign in {-1.0, +1.0}.
  double sign();

 private:
  uint64_t s_[4];  // xoshiro256++ state
};

}  // namespace usyf
