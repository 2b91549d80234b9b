#pragma once

#include <cstdint>
#include <vector>

#include "mixer/rng.hpp"

namespace mixer {

// Component sizes of a graph, largest first. The multiset is the whole
// state for mean-field dynamics: edges inside components are never needed.
struct ComponentMultiset {
  std::vector<std::uint64_t> sizes;
  std::uint64_t total = 0;
};

// Sorts descending and fills the total.
ComponentMultiset make_multiset(std::vector<std::uint64_t> sizes);

struct ComponentStats {
  std::uint64_t L1 = 0;        // largest component
  std::uint64_t L2 = 0;        // second largest
  std::uint64_t R2 = 0;        // sum of squared sizes
  std::uint64_t R2_minus = 0;  // R2 without the largest
  std::uint64_t R3 = 0;        // sum of cubed sizes
  std::uint64_t R3_minus = 0;  // R3 without the largest
  std::uint64_t I1 = 0;        // number of singletons
  std::uint64_t total = 0;
};

ComponentStats component_stats(const ComponentMultiset& cm);

// Components of an Erdos-Renyi graph G(m, p). Expected time
// O(m + p m^2): edges are generated with geometric jumps through the
// lexicographic pair index and merged with union-find.
ComponentMultiset sample_er_components(std::uint64_t m, double p, Rng& rng);

// Same edge sequence as sample_er_components, materialized. Reference path
// for tests (quadratic check of the skip sampler's edge law).
std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_er_edges(
    std::uint64_t m, double p, Rng& rng);

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
};

// Monte Carlo estimate of the pair-density of G(m, p): R2/m when
// lambda = m*p <= 1, R2_minus/m (giant excluded) when supercritical.
MeanStderr mc_r2_density(std::uint64_t m, double p, std::uint64_t replicas,
                         Rng& rng);

// Keeps each component independently with probability (1-1/q)^r: the law
// of the never-activated components after r activation rounds.
ComponentMultiset survivors_after_rounds(const ComponentMultiset& cm,
                                         std::uint64_t rounds, double q,
                                         Rng& rng);

}  // namespace mixer
