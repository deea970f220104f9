#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace sgl {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream `index` of a master seed; results depend only on
// (master, index), never on how work is scheduled.
inline Rng stream_rng(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(master)),
                    static_cast<std::uint32_t>(splitmix64(master) >> 32),
                    static_cast<std::uint32_t>(splitmix64(index ^ 0x5bd1e995ULL)),
                    static_cast<std::uint32_t>(splitmix64(index ^ 0x5bd1e995ULL) >> 32)};
  return Rng(seq);
}

inline Eigen::VectorXd standard_normal(Rng& rng, int n) {
  std::normal_distribution<double> N;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = N(rng);
  return x;
}

}  // namespace sgl
