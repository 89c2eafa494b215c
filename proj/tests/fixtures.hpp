#pragma once

#include <map>
#include <random>

#include "robinsdp/criterion.hpp"
#include "robinsdp/fem_forward.hpp"

namespace fixtures {

inline constexpr double kMeshSize = 0.05;

/// Default disk geometry (interface radius 0.5, 8 segments per arc), built once per (n, m).
inline const robinsdp::DiscreteForwardMap& disk_map(std::size_t n, std::size_t m) {
  static std::map<std::pair<std::size_t, std::size_t>, robinsdp::DiscreteForwardMap> cache;
  auto it = cache.find({n, m});
  if (it == cache.end()) {
    it = cache.emplace(std::pair{n, m}, robinsdp::assemble(robinsdp::build_disk_geometry(n, 0.5, 8), kMeshSize, m))
             .first;
  }
  return it->second;
}

inline robinsdp::CoefficientVector uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  auto x = robinsdp::CoefficientVector::constant(n, lo);
  for (double& v : x) v = u(rng);
  return x;
}

}  // namespace fixtures
