#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mixer/phase_diagram.hpp"
#include "mixer/rng.hpp"

namespace mixer {

// Color occupation counts of a Potts configuration. The count vector is a
// full state for the dynamics: vertex identity never matters on the
// complete graph.
struct CountVector {
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;
};

struct HatNuInit {
  CountVector state;
  std::size_t dominant = 0;
};

// Product initialization: a uniformly chosen dominant color gets each
// vertex with probability m0, the rest spread uniformly. DomainError
// unless m0 in [1/q, 1].
HatNuInit init_hat_nu(std::uint64_t n, std::size_t q, double m0, Rng& rng);

// One heat-bath update: a uniform vertex resamples its color with weight
// exp((beta/n) * (count of that color excluding the vertex itself)).
void glauber_step(CountVector& state, double beta, Rng& rng);

void glauber_steps(CountVector& state, double beta, std::uint64_t steps,
                   Rng& rng);

// Test hook: the same kernel driven by per-color uniforms via exponential
// races, so permuting colors together with their uniforms permutes the
// outcome pathwise. Returns (old color, new color).
std::pair<std::size_t, std::size_t> glauber_step_keyed(
    CountVector& state, double beta, const std::vector<double>& race_pick,
    const std::vector<double>& race_new);

struct PottsExitTimes {
  std::optional<std::uint64_t> tau_plus;
  std::optional<std::uint64_t> tau_minus;
  std::uint64_t steps_run = 0;
};

// Runs the chain until the dominant proportion leaves
// [m_star - gamma/sqrt(n), m_star + gamma/sqrt(n)]; stops at the first
// exit (index 0 if the start is already outside), both empty on timeout.
PottsExitTimes saddle_exit_times_potts(CountVector state,
                                       std::size_t dominant, double beta,
                                       double m_star, double gamma,
                                       std::uint64_t max_steps, Rng& rng);

// Largest minus smallest proportion among coordinates other than
// `exclude` (all coordinates when empty).
double coordinate_gap(const CountVector& state,
                      std::optional<std::size_t> exclude);

struct PottsPhaseResult {
  enum class Kind { Disordered, Ordered, Unsettled } kind = Kind::Unsettled;
  std::size_t color = 0;  // meaningful when kind == Ordered
};

// Disordered: every proportion within tol of 1/q. Ordered(i): coordinate i
// within tol of m_r and the rest within tol of (1-m_r)/(q-1). Anything
// else is Unsettled.
PottsPhaseResult classify_potts_phase(const CountVector& state,
                                      const PottsThresholds& thr,
                                      double tol = 0.1);

struct PottsTrajectoryRecord {
  std::uint64_t t = 0;
  std::vector<std::uint64_t> counts;
};

struct PottsRunOptions {
  double horizon_coef = 30.0;    // steps = ceil(coef * n * ln n)
  std::uint64_t max_steps = 0;   // overrides the horizon when nonzero
  std::uint64_t record_stride = 0;  // 0 -> n
  double classify_tol = 0.1;
  double gap_eps = 0.05;  // gap tracked while s_dom > 1/q + gap_eps/2
};

struct PottsRunResult {
  PottsPhaseResult phase;
  std::uint64_t steps_run = 0;
  double max_gap_tracked = 0.0;
  std::vector<PottsTrajectoryRecord> trajectory;
};

// Runs Glauber until the state classifies as a stable branch (Ordered
// always stops; Disordered stops only when beta < beta_s, where the
// uniform branch is attracting) or the horizon ends. The non-dominant
// coordinate gap is tracked every step while the dominant proportion
// stays above 1/q + gap_eps/2.
PottsRunResult run_potts_quasi_equilibration(const CountVector& state0,
                                             std::size_t dominant,
                                             double beta,
                                             const PottsThresholds& thr,
                                             Rng& rng,
                                             const PottsRunOptions& opt = {});

// Euler iteration of the proportions drift with step 1/n_effective;
// returns the trajectory including the start. The iterate stays on the
// simplex to machine precision.
std::vector<std::vector<double>> deterministic_flow(std::vector<double> s0,
                                                    double beta, double q,
                                                    std::uint64_t steps,
                                                    double n_effective);

}  // namespace mixer
