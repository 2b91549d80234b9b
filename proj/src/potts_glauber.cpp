#include "mixer/potts_glauber.hpp"

#include <algorithm>
#include <cmath>

#include "mixer/errors.hpp"

namespace mixer {
namespace {

void require_state(const CountVector& state, const char* who) {
  if (state.counts.empty() || state.n == 0)
    throw DomainError(std::string(who) + ": empty state");
}

}  // namespace

HatNuInit init_hat_nu(std::uint64_t n, std::size_t q, double m0, Rng& rng) {
  if (n == 0 || q < 2) throw DomainError("init_hat_nu: need n >= 1, q >= 2");
  if (!(m0 >= 1.0 / static_cast<double>(q) - 1e-12) || !(m0 <= 1.0))
    throw DomainError("init_hat_nu: m0 outside [1/q, 1]");
  HatNuInit out;
  out.dominant = static_cast<std::size_t>(rng.below(q));
  out.state.n = n;
  out.state.counts.assign(q, 0);
  for (std::uint64_t v = 0; v < n; ++v) {
    const double u = rng.unit();
    std::size_t color;
    if (u < m0) {
      color = out.dominant;
    } else {
      // u conditioned on [m0, 1) is uniform; one draw decides everything.
      const double r = (u - m0) / (1.0 - m0);
      auto idx = static_cast<std::size_t>(r * static_cast<double>(q - 1));
      if (idx > q - 2) idx = q - 2;
      color = idx < out.dominant ? idx : idx + 1;
    }
    ++out.state.counts[color];
  }
  return out;
}

void glauber_step(CountVector& state, double beta, Rng& rng) {
  const std::uint64_t n = state.n;
  const double bn = beta / static_cast<double>(n);
  const std::size_t q = state.counts.size();
  // Color of a uniform vertex.
  std::uint64_t u = rng.below(n);
  std::size_t k = 0;
  while (u >= state.counts[k]) {
    u -= state.counts[k];
    ++k;
  }
  static thread_local std::vector<double> w;
  w.resize(q);
  double total = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    const auto c = state.counts[j] - (j == k ? 1 : 0);
    w[j] = std::exp(bn * static_cast<double>(c));
    total += w[j];
  }
  double target = rng.unit() * total;
  std::size_t j = 0;
  while (j + 1 < q && target >= w[j]) {
    target -= w[j];
    ++j;
  }
  --state.counts[k];
  ++state.counts[j];
}

void glauber_steps(CountVector& state, double beta, std::uint64_t steps,
                   Rng& rng) {
  require_state(state, "glauber_steps");
  for (std::uint64_t t = 0; t < steps; ++t) glauber_step(state, beta, rng);
}

std::pair<std::size_t, std::size_t> glauber_step_keyed(
    CountVector& state, double beta, const std::vector<double>& race_pick,
    const std::vector<double>& race_new) {
  require_state(state, "glauber_step_keyed");
  const std::size_t q = state.counts.size();
  if (race_pick.size() != q || race_new.size() != q)
    throw DomainError("glauber_step_keyed: need one uniform per color");
  const double bn = beta / static_cast<double>(state.n);
  // Exponential race: color j wins with probability proportional to its
  // rate, and a joint permutation of (counts, uniforms) permutes the
  // winner.
  auto race = [q](const std::vector<double>& u, auto&& rate) {
    std::size_t best = q;
    double best_t = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      const double r = rate(j);
      if (r <= 0.0) continue;
      const double t = -std::log(u[j]) / r;
      if (best == q || t < best_t) {
        best = j;
        best_t = t;
      }
    }
    return best;
  };
  const std::size_t k = race(race_pick, [&](std::size_t j) {
    return static_cast<double>(state.counts[j]);
  });
  const std::size_t j = race(race_new, [&](std::size_t jj) {
    const auto c = state.counts[jj] - (jj == k ? 1 : 0);
    return std::exp(bn * static_cast<double>(c));
  });
  --state.counts[k];
  ++state.counts[j];
  return {k, j};
}

PottsExitTimes saddle_exit_times_potts(CountVector state,
                                       std::size_t dominant, double beta,
                                       double m_star, double gamma,
                                       std::uint64_t max_steps, Rng& rng) {
  require_state(state, "saddle_exit_times_potts");
  const double n = static_cast<double>(state.n);
  const double half = gamma / std::sqrt(n);
  PottsExitTimes out;
  for (std::uint64_t t = 0; t <= max_steps; ++t) {
    const double s_dom = static_cast<double>(state.counts[dominant]) / n;
    if (s_dom > m_star + half) {
      out.tau_plus = t;
      out.steps_run = t;
      return out;
    }
    if (s_dom < m_star - half) {
      out.tau_minus = t;
      out.steps_run = t;
      return out;
    }
    if (t == max_steps) break;
    glauber_step(state, beta, rng);
  }
  out.steps_run = max_steps;
  return out;
}

double coordinate_gap(const CountVector& state,
                      std::optional<std::size_t> exclude) {
  require_state(state, "coordinate_gap");
  std::uint64_t lo = 0, hi = 0;
  bool seen = false;
  for (std::size_t j = 0; j < state.counts.size(); ++j) {
    if (exclude && *exclude == j) continue;
    if (!seen) {
      lo = hi = state.counts[j];
      seen = true;
    } else {
      lo = std::min(lo, state.counts[j]);
      hi = std::max(hi, state.counts[j]);
    }
  }
  if (!seen) throw DomainError("coordinate_gap: no coordinates left");
  return static_cast<double>(hi - lo) / static_cast<double>(state.n);
}

PottsPhaseResult classify_potts_phase(const CountVector& state,
                                      const PottsThresholds& thr,
                                      double tol) {
  require_state(state, "classify_potts_phase");
  const double n = static_cast<double>(state.n);
  const double q = static_cast<double>(state.counts.size());
  bool uniform = true;
  for (auto c : state.counts)
    uniform = uniform && std::abs(static_cast<double>(c) / n - 1.0 / q) <= tol;
  if (uniform) return {PottsPhaseResult::Kind::Disordered, 0};
  std::size_t top = 0;
  for (std::size_t j = 1; j < state.counts.size(); ++j)
    if (state.counts[j] > state.counts[top]) top = j;
  const double rest = (1.0 - thr.m_r) / (q - 1.0);
  bool ordered =
      std::abs(static_cast<double>(state.counts[top]) / n - thr.m_r) <= tol;
  for (std::size_t j = 0; j < state.counts.size(); ++j)
    if (j != top)
      ordered = ordered &&
                std::abs(static_cast<double>(state.counts[j]) / n - rest) <= tol;
  if (ordered) return {PottsPhaseResult::Kind::Ordered, top};
  return {PottsPhaseResult::Kind::Unsettled, 0};
}

PottsRunResult run_potts_quasi_equilibration(const CountVector& state0,
                                             std::size_t dominant,
                                             double beta,
                                             const PottsThresholds& thr,
                                             Rng& rng,
                                             const PottsRunOptions& opt) {
  require_state(state0, "run_potts_quasi_equilibration");
  const double n = static_cast<double>(state0.n);
  const std::uint64_t steps =
      opt.max_steps > 0 ? opt.max_steps
                        : static_cast<std::uint64_t>(
                              std::ceil(opt.horizon_coef * n * std::log(n)));
  const std::uint64_t stride =
      opt.record_stride > 0 ? opt.record_stride : state0.n;
  const double gap_floor = 1.0 / static_cast<double>(state0.counts.size()) +
                           opt.gap_eps / 2.0;
  PottsRunResult out;
  CountVector state = state0;
  out.trajectory.push_back({0, state.counts});
  for (std::uint64_t t = 1; t <= steps; ++t) {
    glauber_step(state, beta, rng);
    if (static_cast<double>(state.counts[dominant]) / n > gap_floor)
      out.max_gap_tracked =
          std::max(out.max_gap_tracked, coordinate_gap(state, dominant));
    if (t % stride == 0 || t == steps) {
      out.trajectory.push_back({t, state.counts});
      const auto phase = classify_potts_phase(state, thr, opt.classify_tol);
      const bool stable_disordered =
          phase.kind == PottsPhaseResult::Kind::Disordered &&
          beta < thr.beta_s - 1e-9;
      if (phase.kind == PottsPhaseResult::Kind::Ordered || stable_disordered) {
        out.phase = phase;
        out.steps_run = t;
        return out;
      }
    }
  }
  out.phase = classify_potts_phase(state, thr, opt.classify_tol);
  out.steps_run = steps;
  return out;
}

std::vector<std::vector<double>> deterministic_flow(std::vector<double> s0,
                                                    double beta, double q,
                                                    std::uint64_t steps,
                                                    double n_effective) {
  if (!(n_effective > 0.0))
    throw DomainError("deterministic_flow: n_effective must be positive");
  std::vector<std::vector<double>> out;
  out.reserve(steps + 1);
  out.push_back(s0);
  for (std::uint64_t t = 0; t < steps; ++t) {
    const auto d = vector_drift(s0, beta, q);
    for (std::size_t i = 0; i < s0.size(); ++i) s0[i] += d[i] / n_effective;
    out.push_back(s0);
  }
  return out;
}

}  // namespace mixer
