#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mixer/errors.hpp"
#include "mixer/random_graph.hpp"
#include "mixer/rng.hpp"
#include "mixer/stats.hpp"

namespace mixer {

// A distribution over canonical state keys (component-size partitions
// sorted descending, or color-count vectors), keys sorted.
struct ExactDistribution {
  std::vector<std::vector<std::uint64_t>> support;
  std::vector<double> probs;
};

// All integer partitions of n, parts descending, lexicographically sorted.
std::vector<std::vector<std::uint64_t>> partitions_of(std::uint64_t n);

// Component-size distribution of G(m, p) by enumeration of all 2^C(m,2)
// edge sets. SizeError for m > 7.
ExactDistribution er_exact_components(std::size_t m, double p);

// Random-cluster measure on the component partition: weight
// p^|A| (1-p)^(C(n,2)-|A|) q^(#components) summed over edge sets.
// SizeError for n > 6 or n == 0.
ExactDistribution rc_exact_stationary(std::size_t n, double p, double q);

struct ExactKernel {
  std::vector<std::vector<std::uint64_t>> states;
  std::vector<std::vector<double>> rows;
};

// One-step transition matrix of the activation/percolation dynamics on
// partitions of n (percolation probability beta/n). SizeError for n > 5.
ExactKernel cm_exact_kernel(std::size_t n, double beta, double q);

// Full-refresh variant; q must be an integer >= 2 (TypeError).
ExactKernel sw_exact_kernel(std::size_t n, double beta, double q);

// l1 norm of mu P - mu with mu the random-cluster measure at p = beta/n.
double cm_exact_kernel_check(std::size_t n, double beta, double q);
double sw_exact_kernel_check(std::size_t n, double beta, double q);

// Color-count law of the mean-field Potts measure:
// pi(c) proportional to multinomial(n; c) * exp((beta/n) sum_k C(c_k, 2)).
// Keys in colex order. SizeError when the support exceeds 50000 states.
ExactDistribution potts_counts_stationary(std::size_t n, std::size_t q,
                                          double beta);

// Max detailed-balance residual |pi(a) P(a,b) - pi(b) P(b,a)| of heat-bath
// resampling on counts. self_exclusion=false drops the "vertex does not
// count itself" correction; that variant must fail balance for beta > 0.
double glauber_balance_check(std::size_t n, std::size_t q, double beta,
                             bool self_exclusion = true);

double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

// Distribution after t kernel steps from the state at start_index.
std::vector<double> kernel_power_distribution(const ExactKernel& kernel,
                                              std::size_t start_index,
                                              std::uint64_t t);

std::size_t state_index(const std::vector<std::vector<std::uint64_t>>& states,
                        const std::vector<std::uint64_t>& key);

// TV between the sampler's empirical law and the exact one. The sampler is
// called once per replica and must return a canonical key; a key outside
// the exact support raises SupportError.
template <class Sampler>
MeanStderr empirical_tv(Sampler&& sample_state,
                        const ExactDistribution& exact,
                        std::uint64_t replicas, Rng& rng) {
  if (replicas == 0) throw DomainError("empirical_tv: replicas must be > 0");
  std::map<std::vector<std::uint64_t>, std::size_t> index;
  for (std::size_t i = 0; i < exact.support.size(); ++i)
    index[exact.support[i]] = i;
  std::vector<std::uint64_t> counts(exact.support.size(), 0);
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const auto key = sample_state(rng);
    const auto it = index.find(key);
    if (it == index.end())
      throw SupportError("empirical_tv: sampled state outside exact support");
    ++counts[it->second];
  }
  double tv = 0.0;
  double var = 0.0;
  const double R = static_cast<double>(replicas);
  for (std::size_t i = 0; i < exact.support.size(); ++i) {
    const double emp = static_cast<double>(counts[i]) / R;
    tv += std::abs(emp - exact.probs[i]);
    var += exact.probs[i] * (1.0 - exact.probs[i]) / R;
  }
  return {0.5 * tv, 0.5 * std::sqrt(var)};
}

}  // namespace mixer
