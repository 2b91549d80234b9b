#include "mixer/cm_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "mixer/errors.hpp"
#include "mixer/replica.hpp"
#include "mixer/stats.hpp"

namespace mixer {
namespace {

double percolation_prob(const ModelParams& params, std::uint64_t n) {
  if (n == 0) throw DomainError("cm_step: empty state");
  return std::min(1.0, params.beta / static_cast<double>(n));
}

CmTrajectoryRecord make_record(std::uint64_t t, const RcState& state,
                               const CmStepRecord& rec) {
  const auto st = component_stats(state.components);
  CmTrajectoryRecord out;
  out.t = t;
  out.L1 = st.L1;
  out.L2 = st.L2;
  out.R2_minus = st.R2_minus;
  out.I1 = st.I1;
  out.components = state.components.sizes.size();
  out.activated_vertices = rec.activated_vertices;
  out.giant_activated = rec.giant_activated;
  return out;
}

}  // namespace

RcState init_product(std::uint64_t n, double lambda0, Rng& rng) {
  if (n == 0) throw DomainError("init_product: n must be positive");
  if (!(lambda0 >= 0.0)) throw DomainError("init_product: lambda0 < 0");
  const double p = std::min(1.0, lambda0 / static_cast<double>(n));
  return {sample_er_components(n, p, rng), n};
}

RcState cm_step(const RcState& state, const ModelParams& params, Rng& rng,
                CmStepRecord* rec) {
  if (!(params.q > 1.0)) throw DomainError("cm_step: requires q > 1");
  const double p = percolation_prob(params, state.n);
  const double p_act = 1.0 / params.q;
  std::vector<std::uint64_t> kept;
  kept.reserve(state.components.sizes.size());
  std::uint64_t active = 0;
  bool giant_active = false;
  for (std::size_t i = 0; i < state.components.sizes.size(); ++i) {
    if (rng.bernoulli(p_act)) {
      active += state.components.sizes[i];
      if (i == 0) giant_active = true;
    } else {
      kept.push_back(state.components.sizes[i]);
    }
  }
  const auto fresh = sample_er_components(active, p, rng);
  kept.insert(kept.end(), fresh.sizes.begin(), fresh.sizes.end());
  if (rec) {
    rec->activated_vertices = active;
    rec->giant_activated = giant_active;
  }
  return {make_multiset(std::move(kept)), state.n};
}

RcState sw_step(const RcState& state, const ModelParams& params, Rng& rng,
                CmStepRecord* rec) {
  const auto q = static_cast<std::uint64_t>(std::llround(params.q));
  if (std::abs(params.q - static_cast<double>(q)) > 1e-9 || q < 2)
    throw TypeError("sw_step: q must be an integer >= 2");
  const double p = percolation_prob(params, state.n);
  std::vector<std::uint64_t> class_size(q, 0);
  for (auto s : state.components.sizes) class_size[rng.below(q)] += s;
  std::vector<std::uint64_t> sizes;
  sizes.reserve(state.components.sizes.size());
  for (std::uint64_t c = 0; c < q; ++c) {
    const auto fresh = sample_er_components(class_size[c], p, rng);
    sizes.insert(sizes.end(), fresh.sizes.begin(), fresh.sizes.end());
  }
  if (rec) {
    rec->activated_vertices = state.n;
    rec->giant_activated = true;
  }
  return {make_multiset(std::move(sizes)), state.n};
}

RcPhase classify_rc_phase(const RcState& state, const RcThresholds& thr) {
  const std::uint64_t l1 =
      state.components.sizes.empty() ? 0 : state.components.sizes[0];
  return static_cast<double>(l1) >=
                 thr.theta_star * static_cast<double>(state.n)
             ? RcPhase::Ordered
             : RcPhase::Disordered;
}

GoodSetReport good_set_check(const RcState& state, double q, double K,
                             std::size_t t, const std::vector<double>& v_seq,
                             double theta_star, double v_dev_scale) {
  if (!(K > 0.0)) throw DomainError("good_set_check: K must be positive");
  if (!(v_dev_scale > 0.0))
    throw DomainError("good_set_check: v_dev_scale must be positive");
  if (v_seq.empty()) throw DomainError("good_set_check: empty v sequence");
  const auto st = component_stats(state.components);
  const double n = static_cast<double>(state.n);
  const double logn = std::log(n);
  const double sqrtn = std::sqrt(n);
  GoodSetReport rep;
  rep.giant_near_saddle =
      std::abs(static_cast<double>(st.L1) - theta_star * n) <=
      K * sqrtn * logn;
  rep.second_small = static_cast<double>(st.L2) <= K * logn;
  rep.r2_bounded = static_cast<double>(st.R2_minus) <= K * n;
  rep.r3_bounded = static_cast<double>(st.R3_minus) <= K * n;
  rep.many_singletons = static_cast<double>(st.I1) >= n / K;
  const double v_emp =
      (1.0 / q) * (1.0 - 1.0 / q) * static_cast<double>(st.R2_minus) / n;
  const double v_t = v_seq[std::min(t, v_seq.size() - 1)];
  rep.v_deviation = std::abs(v_emp - v_t);
  rep.variance_tracked = rep.v_deviation <= v_dev_scale * logn * logn / sqrtn;
  rep.all = rep.giant_near_saddle && rep.second_small && rep.r2_bounded &&
            rep.r3_bounded && rep.many_singletons && rep.variance_tracked;
  return rep;
}

ExitWindowTimes exit_window_times(const std::vector<std::uint64_t>& l1_series,
                                  double theta_star, double gamma,
                                  std::uint64_t n) {
  const double center = theta_star * static_cast<double>(n);
  const double half = gamma * std::sqrt(static_cast<double>(n));
  for (std::uint64_t t = 0; t < l1_series.size(); ++t) {
    const double l1 = static_cast<double>(l1_series[t]);
    if (l1 > center + half) return {t, std::nullopt};
    if (l1 < center - half) return {std::nullopt, t};
  }
  return {std::nullopt, std::nullopt};
}

ExitResult run_cm_exit_replica(std::uint64_t n, double lambda0,
                               const ModelParams& params, double theta_star,
                               double gamma, std::uint64_t max_steps,
                               Rng& rng, const GoodSetSpec* good_set) {
  const double center = theta_star * static_cast<double>(n);
  const double half = gamma * std::sqrt(static_cast<double>(n));
  const bool monitor = good_set != nullptr && good_set->K > 0.0;
  bool violated = false;
  RcState state = init_product(n, lambda0, rng);
  for (std::uint64_t t = 0; t <= max_steps; ++t) {
    if (monitor && !violated)
      violated = !good_set_check(state, params.q, good_set->K, t,
                                 good_set->v_seq, theta_star,
                                 good_set->v_dev_scale)
                      .all;
    const double l1 = state.components.sizes.empty()
                          ? 0.0
                          : static_cast<double>(state.components.sizes[0]);
    if (l1 > center + half) return {ExitOutcome::Right, t, violated};
    if (l1 < center - half) return {ExitOutcome::Left, t, violated};
    if (t == max_steps) break;
    state = cm_step(state, params, rng);
  }
  return {ExitOutcome::Timeout, max_steps, violated};
}

ExitProbs estimate_exit_probs_cm(std::uint64_t n, double lambda0,
                                 const ModelParams& params, double theta_star,
                                 double gamma, std::uint64_t replicas,
                                 std::uint64_t max_steps,
                                 std::uint64_t master_seed, int threads) {
  if (replicas == 0)
    throw DomainError("estimate_exit_probs_cm: replicas must be positive");
  const auto results = run_replicas<ExitResult>(
      replicas, master_seed,
      [&](std::uint64_t, Rng& rng) {
        return run_cm_exit_replica(n, lambda0, params, theta_star, gamma,
                                   max_steps, rng);
      },
      threads);
  ExitProbs out;
  out.replicas = replicas;
  std::uint64_t right = 0, left = 0, timeout = 0;
  Welford steps;
  for (const auto& r : results) {
    switch (r.outcome) {
      case ExitOutcome::Right: ++right; steps.add(static_cast<double>(r.step)); break;
      case ExitOutcome::Left: ++left; steps.add(static_cast<double>(r.step)); break;
      case ExitOutcome::Timeout: ++timeout; break;
    }
  }
  const double R = static_cast<double>(replicas);
  out.p_right = right / R;
  out.p_left = left / R;
  out.p_timeout = timeout / R;
  out.se_right = binomial_se(out.p_right, replicas);
  out.se_left = binomial_se(out.p_left, replicas);
  out.se_timeout = binomial_se(out.p_timeout, replicas);
  out.mean_exit_step = steps.count() > 0 ? steps.mean() : 0.0;
  return out;
}

QuasiEqResult run_quasi_equilibration(const RcState& state0,
                                      const ModelParams& params,
                                      const RcThresholds& thr, Rng& rng,
                                      const QuasiEqOptions& opt,
                                      bool use_sw) {
  const double n = static_cast<double>(state0.n);
  const std::uint64_t steps =
      opt.max_steps > 0
          ? opt.max_steps
          : static_cast<std::uint64_t>(std::ceil(opt.horizon_coef * std::log(n)));
  const std::uint64_t stride = std::max<std::uint64_t>(1, opt.record_stride);
  QuasiEqResult out;
  RcState state = state0;
  out.trajectory.push_back(make_record(0, state, CmStepRecord{}));
  for (std::uint64_t t = 1; t <= steps; ++t) {
    CmStepRecord rec;
    state = use_sw ? sw_step(state, params, rng, &rec)
                   : cm_step(state, params, rng, &rec);
    if (t % stride == 0 || t == steps)
      out.trajectory.push_back(make_record(t, state, rec));
  }
  const double l1 = state.components.sizes.empty()
                        ? 0.0
                        : static_cast<double>(state.components.sizes[0]);
  out.phase = classify_rc_phase(state, thr);
  // Disordered dust at criticality has L1 of order log(n)/I with
  // I = lambda_ia - 1 - log(lambda_ia) tiny, so a bare coef*log(n) bound
  // would never be met. Below theta_s*n no reactivation can rebuild a
  // giant, which is the physically settled criterion at scale.
  const double dust_bound = std::max(opt.disordered_coef * std::log(n),
                                     thr.theta_s * n);
  out.settled = out.phase == RcPhase::Ordered
                    ? std::abs(l1 / n - thr.theta_r) <= opt.ordered_tol
                    : l1 <= dust_bound;
  return out;
}

}  // namespace mixer
