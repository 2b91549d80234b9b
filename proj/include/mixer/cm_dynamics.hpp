#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mixer/phase_diagram.hpp"
#include "mixer/random_graph.hpp"
#include "mixer/rng.hpp"

namespace mixer {

// Mean-field random-cluster configuration. Only the component-size
// multiset matters: every step resamples edges among activated vertices
// uniformly, so no edge structure has to be stored.
struct RcState {
  ComponentMultiset components;
  std::uint64_t n = 0;
};

struct CmStepRecord {
  std::uint64_t activated_vertices = 0;
  bool giant_activated = false;  // activation flag of the stored largest
};

// Product-measure start: components of G(n, lambda0/n).
RcState init_product(std::uint64_t n, double lambda0, Rng& rng);

// One activation/percolation step: each component becomes active with
// probability 1/q; active vertices are rewired as G(A, beta/n), inactive
// components persist.
RcState cm_step(const RcState& state, const ModelParams& params, Rng& rng,
                CmStepRecord* rec = nullptr);

// Full-refresh variant: every component draws a color uniform on q colors
// and each color class percolates as G(A_c, beta/n). TypeError unless q is
// an integer >= 2.
RcState sw_step(const RcState& state, const ModelParams& params, Rng& rng,
                CmStepRecord* rec = nullptr);

enum class RcPhase { Disordered, Ordered };

// Ordered iff L1 >= theta_star * n.
RcPhase classify_rc_phase(const RcState& state, const RcThresholds& thr);

// Concentration predicates for a critical trajectory at time t, all with a
// single calibration constant K, plus the variance-tracking deviation of
// the non-giant pair density against the analytic sequence v_t. Both K and
// the deviation scale C are existential constants; callers calibrate them
// empirically per (q, beta, horizon, n).
struct GoodSetReport {
  bool giant_near_saddle = false;  // |L1 - theta_star*n| <= K sqrt(n) log n
  bool second_small = false;       // L2 <= K log n
  bool r2_bounded = false;         // R2_minus <= K n
  bool r3_bounded = false;         // R3_minus <= K n
  bool many_singletons = false;    // I1 >= n / K
  bool variance_tracked = false;   // |v_emp - v_t| <= C log^2(n)/sqrt(n)
  bool all = false;
  double v_deviation = 0.0;
};

GoodSetReport good_set_check(const RcState& state, double q, double K,
                             std::size_t t, const std::vector<double>& v_seq,
                             double theta_star, double v_dev_scale = 1.0);

struct ExitWindowTimes {
  std::optional<std::uint64_t> tau_plus;
  std::optional<std::uint64_t> tau_minus;
};

// First index where the series leaves [theta_star*n - gamma*sqrt(n),
// theta_star*n + gamma*sqrt(n)]; index 0 counts if the start is already
// outside. The scan stops at the first exit; both fields empty on timeout.
ExitWindowTimes exit_window_times(const std::vector<std::uint64_t>& l1_series,
                                  double theta_star, double gamma,
                                  std::uint64_t n);

enum class ExitOutcome { Right, Left, Timeout };

struct ExitResult {
  ExitOutcome outcome = ExitOutcome::Timeout;
  std::uint64_t step = 0;
  bool good_set_violated = false;  // only set when monitoring is requested
};

// Optional per-step regularity monitoring for exit runs: K > 0 enables
// good_set_check against v_seq at every visited state. Consumes no
// randomness, so monitored and unmonitored runs walk identical paths.
struct GoodSetSpec {
  double K = 0.0;
  double v_dev_scale = 1.0;
  std::vector<double> v_seq;
};

// One replica of the critical escape experiment: start at G(n, lambda0/n),
// run CM steps until L1 leaves the gamma*sqrt(n) window around
// theta_star*n.
ExitResult run_cm_exit_replica(std::uint64_t n, double lambda0,
                               const ModelParams& params, double theta_star,
                               double gamma, std::uint64_t max_steps,
                               Rng& rng, const GoodSetSpec* good_set = nullptr);

struct ExitProbs {
  double p_right = 0.0;
  double p_left = 0.0;
  double p_timeout = 0.0;
  double se_right = 0.0;
  double se_left = 0.0;
  double se_timeout = 0.0;
  double mean_exit_step = 0.0;
  std::uint64_t replicas = 0;
};

ExitProbs estimate_exit_probs_cm(std::uint64_t n, double lambda0,
                                 const ModelParams& params, double theta_star,
                                 double gamma, std::uint64_t replicas,
                                 std::uint64_t max_steps,
                                 std::uint64_t master_seed, int threads = 0);

struct CmTrajectoryRecord {
  std::uint64_t t = 0;
  std::uint64_t L1 = 0;
  std::uint64_t L2 = 0;
  std::uint64_t R2_minus = 0;
  std::uint64_t I1 = 0;
  std::uint64_t components = 0;
  std::uint64_t activated_vertices = 0;
  bool giant_activated = false;
};

struct QuasiEqOptions {
  double horizon_coef = 20.0;     // steps = ceil(horizon_coef * ln n)
  std::uint64_t max_steps = 0;    // overrides the horizon when nonzero
  double ordered_tol = 0.05;      // settled: |L1/n - theta_r| <= tol
  // Settled on the disordered side: L1 <= max(coef * ln n, theta_s * n);
  // the theta_s term dominates at scale (critical dust has L1 of order
  // log(n)/I(lambda_ia) with a large 1/I).
  double disordered_coef = 10.0;
  std::uint64_t record_stride = 1;
};

struct QuasiEqResult {
  RcPhase phase = RcPhase::Disordered;
  bool settled = false;
  std::vector<CmTrajectoryRecord> trajectory;
};

// Runs O(log n) steps from state0 and reports which branch the chain
// settled on. Works for cm_step and (via use_sw) sw_step.
QuasiEqResult run_quasi_equilibration(const RcState& state0,
                                      const ModelParams& params,
                                      const RcThresholds& thr, Rng& rng,
                                      const QuasiEqOptions& opt = {},
                                      bool use_sw = false);

}  // namespace mixer
