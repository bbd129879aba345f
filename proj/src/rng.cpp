#include "usyf/rng.hpp"

#include <cmath>
#include <numbers>

#include "usyf/common.hpp"

namespace usyf {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t root, std::initializer_list<uint64_t> path) {
  uint64_t h = root ^ 0x5851f42d4c957f2dULL;
  splitmix64(h);
  for (uint64_t tag : path) {
    h ^= tag + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    splitmix64(h);
  }
  uint64_t out = h;
  return splitmix64(out);
}

RngStream::RngStream(uint64_t seed) {
  // Seed expansion per the xoshiro authors' recommendation.
  uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

static inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

uint64_t RngStream::next_u64() {
  const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

uint64_t RngStream::uniform_int(uint64_t n) {
  require(n >= 1, "uniform_int: n must be >= 1");
  const uint64_t x = next_u64();
  return static_cast<uint64_t>((static_cast<__uint128_t>(x) * n) >> 64);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_range(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::normal() {
  // (0,1] for the log argument so it never sees zero.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

}  // namespace usyf
