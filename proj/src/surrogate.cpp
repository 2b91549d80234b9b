#include "mixer/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "mixer/errors.hpp"
#include "mixer/potts_glauber.hpp"
#include "mixer/replica.hpp"
#include "mixer/stats.hpp"

namespace mixer {
namespace {

ExitProbs summarize_exits(const std::vector<ExitResult>& results) {
  ExitProbs out;
  out.replicas = results.size();
  std::uint64_t right = 0, left = 0, timeout = 0;
  Welford steps;
  for (const auto& r : results) {
    switch (r.outcome) {
      case ExitOutcome::Right:
        ++right;
        steps.add(static_cast<double>(r.step));
        break;
      case ExitOutcome::Left:
        ++left;
        steps.add(static_cast<double>(r.step));
        break;
      case ExitOutcome::Timeout:
        ++timeout;
        break;
    }
  }
  const double R = static_cast<double>(results.size());
  out.p_right = right / R;
  out.p_left = left / R;
  out.p_timeout = timeout / R;
  out.se_right = binomial_se(out.p_right, out.replicas);
  out.se_left = binomial_se(out.p_left, out.replicas);
  out.se_timeout = binomial_se(out.p_timeout, out.replicas);
  out.mean_exit_step = steps.count() > 0 ? steps.mean() : 0.0;
  return out;
}

// Shared bisection driver: p_left must be nonincreasing in c under common
// random numbers; returns the first c meeting |p - target| <= tol + 2 se.
template <class Eval>
double crn_bisection(double target, double tol_prob, Eval&& p_left_at) {
  double lo = -50.0, hi = 50.0;
  const ExitProbs at_lo = p_left_at(lo);
  if (at_lo.p_left + tol_prob + 2.0 * at_lo.se_left < target)
    throw ConvergenceError("c* search: target above p_left(-50)");
  const ExitProbs at_hi = p_left_at(hi);
  if (at_hi.p_left - tol_prob - 2.0 * at_hi.se_left > target)
    throw ConvergenceError("c* search: target below p_left(+50)");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const ExitProbs p = p_left_at(mid);
    if (std::abs(p.p_left - target) <= tol_prob + 2.0 * p.se_left) return mid;
    if (p.p_left > target)
      lo = mid;  // exits left too often: push the start upward
    else
      hi = mid;
    if (hi - lo < 1e-7) break;
  }
  throw ConvergenceError("c* search: probability band never met");
}

}  // namespace

double surrogate_step_variance(const SurrogateParams& params, std::size_t t) {
  const auto& v = params.noise_variances;
  const double v_t = t < v.size() ? v[t] : params.v_inf;
  return params.h1_val * params.h1_val * v_t + params.h2_val;
}

ZbarDraw zbar_draw(const SurrogateParams& params, Rng& rng) {
  ZbarDraw d;
  d.active = rng.bernoulli(params.activation_prob);
  if (d.active) d.noise = rng.normal();
  return d;
}

double zbar_apply(double z, const SurrogateParams& params,
                  const ZbarDraw& draw, std::size_t t) {
  if (!draw.active) return z;
  return z + params.drift_slope * z +
         std::sqrt(surrogate_step_variance(params, t)) * draw.noise;
}

double zbar_step(double z, std::size_t t, const SurrogateParams& params,
                 Rng& rng) {
  return zbar_apply(z, params, zbar_draw(params, rng), t);
}

ExitResult zbar_run(double z0, const SurrogateParams& params, double gamma,
                    std::uint64_t max_steps, Rng& rng) {
  double z = z0;
  for (std::uint64_t t = 0; t <= max_steps; ++t) {
    if (z > gamma) return {ExitOutcome::Right, t};
    if (z < -gamma) return {ExitOutcome::Left, t};
    if (t == max_steps) break;
    z = zbar_step(z, t, params, rng);
  }
  return {ExitOutcome::Timeout, max_steps};
}

ExitProbs zbar_exit_prob(const SurrogateParams& params, double gamma,
                         std::uint64_t replicas, std::uint64_t max_steps,
                         std::uint64_t master_seed, int threads) {
  if (replicas == 0)
    throw DomainError("zbar_exit_prob: replicas must be positive");
  const auto results = run_replicas<ExitResult>(
      replicas, master_seed,
      [&](std::uint64_t, Rng& rng) {
        const double z0 =
            params.init_mean + std::sqrt(params.init_variance) * rng.normal();
        return zbar_run(z0, params, gamma, max_steps, rng);
      },
      threads);
  return summarize_exits(results);
}

double surrogate_marginal_cdf(const SurrogateParams& params, std::size_t t,
                              double x) {
  if (t > 25)
    throw DomainError("surrogate_marginal_cdf: pattern enumeration gated at "
                      "t <= 25");
  const double a = 1.0 + params.drift_slope;
  const double p_act = params.activation_prob;
  double cdf = 0.0;
  for (std::uint64_t pattern = 0; pattern < (1ULL << t); ++pattern) {
    double prob = 1.0;
    double mean = params.init_mean;
    double var = params.init_variance;
    for (std::size_t s = 0; s < t; ++s) {
      if (pattern >> s & 1) {
        prob *= p_act;
        var = a * a * var + surrogate_step_variance(params, s);
        mean *= a;
      } else {
        prob *= 1.0 - p_act;
      }
    }
    cdf += prob * normal_cdf((x - mean) / std::sqrt(var));
  }
  return cdf;
}

double find_c_star_rc(double target_left, double q, double gamma,
                      std::uint64_t replicas, double tol_prob,
                      std::uint64_t master_seed, std::uint64_t max_steps,
                      int threads) {
  if (!(target_left > 0.0) || !(target_left < 1.0))
    throw DomainError("find_c_star_rc: target must be in (0,1)");
  // init_mean = c * alpha'(lambda_star): build the parameters once at
  // c = 1 and rescale the mean, instead of re-solving thresholds per c.
  SurrogateParams params = make_surrogate_params(q, 1.0);
  const double mean_per_c = params.init_mean;
  auto p_left_at = [&](double c) {
    params.init_mean = c * mean_per_c;
    return zbar_exit_prob(params, gamma, replicas, max_steps, master_seed,
                          threads);
  };
  return crn_bisection(target_left, tol_prob, p_left_at);
}

double estimate_A_q(std::uint64_t n_probe, double q, double beta,
                    std::uint64_t replicas, std::uint64_t master_seed,
                    double m_start, int threads) {
  if (n_probe < 100) throw DomainError("estimate_A_q: n_probe must be >= 100");
  if (replicas < 2) throw DomainError("estimate_A_q: need replicas >= 2");
  const auto qi = static_cast<std::size_t>(std::llround(q));
  if (std::abs(q - static_cast<double>(qi)) > 1e-9 || qi < 2)
    throw TypeError("estimate_A_q: q must be an integer >= 2");
  double m = m_start;
  if (m < 0.0) {
    try {
      m = potts_fixed_points(beta, q).m_star;
    } catch (const NoRootError&) {
      m = 1.0 / q;  // no saddle below beta_u: probe the uniform point
    }
  }
  if (!(m >= 1.0 / q - 1e-12) || !(m <= 1.0))
    throw DomainError("estimate_A_q: start proportion outside [1/q, 1]");
  CountVector start;
  start.n = n_probe;
  start.counts.assign(qi, 0);
  const auto dom = static_cast<std::uint64_t>(
      std::llround(m * static_cast<double>(n_probe)));
  start.counts[0] = std::min(dom, n_probe);
  std::uint64_t rest = n_probe - start.counts[0];
  for (std::size_t j = 1; j < qi; ++j) {
    const std::uint64_t share = rest / (qi - j);
    start.counts[j] = share;
    rest -= share;
  }
  const auto deltas = run_replicas<double>(
      replicas, master_seed,
      [&](std::uint64_t, Rng& rng) {
        CountVector state = start;
        glauber_steps(state, beta, n_probe, rng);
        return (static_cast<double>(state.counts[0]) -
                static_cast<double>(start.counts[0])) /
               static_cast<double>(n_probe);
      },
      threads);
  Welford acc;
  for (double d : deltas) acc.add(d);
  return std::sqrt(static_cast<double>(n_probe) * acc.variance());
}

double find_c_star_potts(double target_left, double q, double beta_c_val,
                         double gamma, double dt, std::uint64_t replicas,
                         double tol_prob, std::uint64_t master_seed,
                         int threads, const PottsSdeOptions& opt) {
  if (!(dt > 0.0) || dt > 1e-3 + 1e-15)
    throw DomainError("find_c_star_potts: need 0 < dt <= 1e-3");
  if (!(target_left > 0.0) || !(target_left < 1.0))
    throw DomainError("find_c_star_potts: target must be in (0,1)");
  const auto fp = potts_fixed_points(beta_c_val, q);
  const double slope = potts_scalar_drift(fp.m_star, beta_c_val, q).derivative;
  const double d0 = std::sqrt(fp.m_star * (1.0 - fp.m_star));
  const double A =
      estimate_A_q(opt.a_probe_n, q, beta_c_val, opt.a_replicas,
                   derive_stream_seed(master_seed, 0x5dea11ULL), fp.m_star,
                   threads);
  const auto steps =
      static_cast<std::uint64_t>(std::ceil(opt.t_max_units / dt));
  const double root_dt = std::sqrt(dt);
  auto p_left_at = [&](double c) {
    const auto results = run_replicas<ExitResult>(
        replicas, master_seed,
        [&](std::uint64_t, Rng& rng) -> ExitResult {
          double z = c + d0 * rng.normal();
          for (std::uint64_t t = 0; t <= steps; ++t) {
            if (z > gamma) return {ExitOutcome::Right, t};
            if (z < -gamma) return {ExitOutcome::Left, t};
            if (t == steps) break;
            z += slope * z * dt + A * root_dt * rng.normal();
          }
          return {ExitOutcome::Timeout, steps};
        },
        threads);
    return summarize_exits(results);
  };
  return crn_bisection(target_left, tol_prob, p_left_at);
}

}  // namespace mixer
