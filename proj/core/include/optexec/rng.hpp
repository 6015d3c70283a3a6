#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>

namespace optexec {

// Distribution sampling is hand-rolled on top of the raw engine output so
// that a given seed produces the same stream on every platform and
// standard-library implementation. Reports embed seeds; byte-identical
// reproduction is part of the output contract.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard exponential variate.
inline double exponential1(std::mt19937_64& gen) {
  return -std::log1p(-uniform01(gen));
}

/// Uniform sample from the unit simplex (symmetric Dirichlet with unit
/// concentration), via normalized exponentials.
inline Eigen::VectorXd dirichlet_uniform(int n, std::mt19937_64& gen) {
  Eigen::VectorXd w(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    w[i] = exponential1(gen);
    sum += w[i];
  }
  w /= sum;
  return w;
}

/// Stable mix of a base seed with a stream index (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace optexec
