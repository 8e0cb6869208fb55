#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "boxcast/behavior.hpp"

namespace boxcast {

// Seeded generator shared by every instance sampler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }
  std::uint64_t next() { return gen_(); }
  // Flat Dirichlet(alpha) sample of length n.
  std::vector<double> dirichlet(int n, double alpha = 1.0);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Dirichlet mixture of the 24 (2,2,2) NS vertices.
Behavior random_ns_222(Rng& rng);
// Dirichlet mixture of the local deterministic vertices of a scenario.
Behavior random_local(Rng& rng, const Scenario& sc);
// Quadripartite box, NS across A0B0|A1B1: sum_k r_k P_k (x) Q_k with random
// NS pair boxes. Full support when `interior` is set.
Behavior random_broadcast_ns(Rng& rng, int terms = 3, bool interior = false);
// Mixture of LR_ns vertices with Dirichlet weights over `support` random picks.
Behavior random_lrns_mixture(Rng& rng, int support = 8);

}  // namespace boxcast
