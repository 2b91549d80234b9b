#pragma once

#include <cstdint>

#include "mixer/cm_dynamics.hpp"
#include "mixer/phase_diagram.hpp"
#include "mixer/rng.hpp"

namespace mixer {

// Per-step noise variance b_t^2 = h1^2 * v_t + h2, with v clamped to its
// geometric limit beyond the precomputed horizon.
double surrogate_step_variance(const SurrogateParams& params, std::size_t t);

struct ZbarDraw {
  bool active = false;
  double noise = 0.0;  // standard normal, drawn only on activation
};

// Consumes the randomness of one step: an activation coin and, when
// active, one standard normal. Splitting draw/apply lets couplings share
// one draw across several chains.
ZbarDraw zbar_draw(const SurrogateParams& params, Rng& rng);

double zbar_apply(double z, const SurrogateParams& params,
                  const ZbarDraw& draw, std::size_t t);

// z_{t+1} = z_t + eps * (f'(theta_star) z_t + b_t N(0,1)).
double zbar_step(double z, std::size_t t, const SurrogateParams& params,
                 Rng& rng);

// Runs from z0 (drawn by the caller) until |z| > gamma.
ExitResult zbar_run(double z0, const SurrogateParams& params, double gamma,
                    std::uint64_t max_steps, Rng& rng);

// Exit statistics with z0 ~ Normal(init_mean, init_variance).
ExitProbs zbar_exit_prob(const SurrogateParams& params, double gamma,
                         std::uint64_t replicas, std::uint64_t max_steps,
                         std::uint64_t master_seed, int threads = 0);

// CDF of z_t, exactly: a mixture of Gaussians over the 2^t activation
// patterns. Gate t <= 25.
double surrogate_marginal_cdf(const SurrogateParams& params, std::size_t t,
                              double x);

// Smallest initial offset c with left-exit probability matching
// target_left, via common-random-numbers bisection on c in [-50, 50]:
// every candidate c replays the same replica streams, so the estimated
// p_left(c) is monotone and the bisection is exact up to the probability
// band tol_prob + 2 * stderr. ConvergenceError if the target is not
// bracketed or the band is never met.
double find_c_star_rc(double target_left, double q, double gamma,
                      std::uint64_t replicas, double tol_prob,
                      std::uint64_t master_seed,
                      std::uint64_t max_steps = 4000, int threads = 0);

// Diffusion coefficient of the dominant-proportion chain at the saddle:
// sqrt(n * Var(S1 shift over n Glauber steps)), estimated from replicas
// started at the saddle (or at proportion m_start when given).
double estimate_A_q(std::uint64_t n_probe, double q, double beta,
                    std::uint64_t replicas, std::uint64_t master_seed,
                    double m_start = -1.0, int threads = 0);

struct PottsSdeOptions {
  double t_max_units = 300.0;  // horizon in diffusion time units
  std::uint64_t a_probe_n = 2000;
  std::uint64_t a_replicas = 2000;
};

// Same coupled-bisection contract for the saddle diffusion
// dz = D'(m_star) z dt + A dB, z_0 ~ Normal(c, m_star(1-m_star)),
// integrated by Euler-Maruyama with step dt (dt <= 1e-3).
double find_c_star_potts(double target_left, double q, double beta_c_val,
                         double gamma, double dt, std::uint64_t replicas,
                         double tol_prob, std::uint64_t master_seed,
                         int threads = 0, const PottsSdeOptions& opt = {});

}  // namespace mixer
