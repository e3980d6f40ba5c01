#pragma once

#include <cstdint>
#include <vector>

#include "core/geometry.hpp"

namespace apc {

// xoshiro256++ seeded through splitmix64. The distribution helpers below are
// spelled out explicitly (instead of <random>) so that identical seeds give
// identical streams on every platform and standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n), n >= 1. Rejection sampling, unbiased.
  uint64_t bounded(uint64_t n);

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Independent standard normal per axis.
  Vec3 normal3();

  // Fisher-Yates permutation of [0, n).
  std::vector<uint32_t> permutation(size_t n);

  // Uniformly chosen k-subset of [0, n), returned sorted ascending.
  std::vector<uint32_t> sample_without_replacement(size_t n, size_t k);

 private:
  uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Deterministic stream splitting: hashes the parts together so per-sample
// generators are independent of draw order.
uint64_t mix_seed(uint64_t a, uint64_t b);
uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c);
uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c, uint64_t d);

}  // namespace apc
