#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "mixer/cm_dynamics.hpp"
#include "mixer/errors.hpp"
#include "mixer/exact_oracle.hpp"
#include "mixer/phase_diagram.hpp"
#include "mixer/potts_glauber.hpp"
#include "mixer/replica.hpp"
#include "mixer/roots.hpp"
#include "mixer/stats.hpp"
#include "mixer/surrogate.hpp"
#include "mixer/version.hpp"

namespace mixer::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Stream indices reserved for auxiliary draws so they never collide with
// replica streams (replica indices are < 2^32 in practice).
constexpr std::uint64_t kCstarStream = 0xC57A000000000001ULL;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(std::uint64_t x) { return std::to_string(x); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) {
    out_.open(path);
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << "# " << kCsvSchema << "\n";
    write_row(header);
  }
  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

int resolve_threads(int requested) {
  if (const char* env = std::getenv("MIXER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) return requested == 0 ? cap : std::min(requested, cap);
  }
  return requested;
}

const char* outcome_name(ExitOutcome o) {
  switch (o) {
    case ExitOutcome::Right: return "right";
    case ExitOutcome::Left: return "left";
    case ExitOutcome::Timeout: return "timeout";
  }
  return "timeout";
}

std::size_t integral_q(double q, const char* kind) {
  const auto qi = static_cast<std::size_t>(std::llround(q));
  if (std::abs(q - static_cast<double>(qi)) > 1e-9 || qi < 2)
    throw ConfigError(std::string(kind) + " requires an integer q >= 2");
  return qi;
}

json rc_thresholds_json(const RcThresholds& t) {
  return json{{"beta_u", t.beta_u},         {"beta_c", t.beta_c},
              {"beta_s", t.beta_s},         {"theta_s", t.theta_s},
              {"theta_star", t.theta_star}, {"theta_r", t.theta_r},
              {"lambda_star", t.lambda_star}, {"xi", t.xi}};
}

json potts_thresholds_json(const PottsThresholds& t) {
  return json{{"beta_u", t.beta_u},
              {"beta_c", t.beta_c},
              {"beta_s", t.beta_s},
              {"m_star", t.m_star},
              {"m_r", t.m_r}};
}

json exit_probs_json(const ExitProbs& p) {
  return json{{"p_right", p.p_right},     {"p_left", p.p_left},
              {"p_timeout", p.p_timeout}, {"se_right", p.se_right},
              {"se_left", p.se_left},     {"se_timeout", p.se_timeout},
              {"mean_exit_step", p.mean_exit_step},
              {"replicas", p.replicas}};
}

struct KindResult {
  json summary;
  json thresholds;
  bool assert_ok = true;
};

fs::path trajectory_dir(const ExperimentConfig& c) {
  const fs::path dir = fs::path(c.out_dir) / "trajectories";
  if (c.trajectory_replicas > 0) fs::create_directories(dir);
  return dir;
}

std::string replica_file(std::uint64_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "replica_%05llu.csv",
                static_cast<unsigned long long>(r));
  return buf;
}

// ---------------------------------------------------------------- kinds --

KindResult run_thresholds(const ExperimentConfig& c) {
  const auto bt = beta_thresholds(c.q);
  const double beta = c.beta.value_or(bt.beta_c);
  KindResult out;
  json rc_json, potts_json;
  std::string row_theta_s = "", row_theta_star = "", row_theta_r = "",
              row_lambda = "", row_xi = fmt(xi_weight(c.q)),
              row_m_star = "", row_m_r = "";
  bool window_ok = true;
  try {
    const auto thr = rc_thresholds(c.q, beta);
    rc_json = rc_thresholds_json(thr);
    row_theta_s = fmt(thr.theta_s);
    row_theta_star = fmt(thr.theta_star);
    row_theta_r = fmt(thr.theta_r);
    row_lambda = fmt(thr.lambda_star);
  } catch (const NoRootError&) {
    window_ok = false;
  }
  try {
    const auto pt = potts_thresholds_at(c.q, beta);
    potts_json = potts_thresholds_json(pt);
    row_m_star = fmt(pt.m_star);
    row_m_r = fmt(pt.m_r);
  } catch (const NoRootError&) {
    window_ok = false;
  }
  CsvWriter csv(fs::path(c.out_dir) / "results.csv",
                {"q", "beta", "beta_u", "beta_c", "beta_s", "theta_s",
                 "theta_star", "theta_r", "lambda_star", "xi", "m_star",
                 "m_r"});
  csv.write_row({fmt(c.q), fmt(beta), fmt(bt.beta_u), fmt(bt.beta_c),
                 fmt(bt.beta_s), row_theta_s, row_theta_star, row_theta_r,
                 row_lambda, row_xi, row_m_star, row_m_r});
  // Residual of the spinodal: the drift maximum at beta_u must sit at 0.
  const double x_lo = 1.0 / c.q + 1e-9 * (1.0 - 1.0 / c.q);
  const double max_d =
      grid_golden_max(
          [&](double x) { return potts_scalar_drift(x, bt.beta_u, c.q).value; },
          x_lo, 1.0, 512, 1e-12)
          .second;
  out.summary = {{"beta", beta},
                 {"beta_u", bt.beta_u},
                 {"beta_c", bt.beta_c},
                 {"beta_s", bt.beta_s},
                 {"xi", xi_weight(c.q)},
                 {"spinodal_residual", max_d},
                 {"window_resolved", window_ok}};
  out.thresholds = json{{"rc", rc_json}, {"potts", potts_json}};
  out.assert_ok = bt.beta_u < bt.beta_c && bt.beta_c < bt.beta_s &&
                  std::abs(max_d) <= 1e-8 && window_ok;
  return out;
}

KindResult run_cm_exit(const ExperimentConfig& c) {
  const auto bt = beta_thresholds(c.q);
  const double beta = c.beta.value_or(bt.beta_c);
  const auto thr = rc_thresholds(c.q, beta);
  const ModelParams params{c.q, beta, c.n};
  const double target = c.target_left >= 0.0 ? c.target_left : thr.xi;
  const std::uint64_t max_steps =
      c.max_steps > 0 ? c.max_steps
                      : static_cast<std::uint64_t>(std::ceil(
                            20.0 * std::log(static_cast<double>(c.n))));
  const std::uint64_t seed = *c.seed;
  double lambda0;
  json cstar_json;
  if (c.lambda0_auto_cstar) {
    const double c_star = find_c_star_rc(
        target, c.q, c.gamma, c.sde_replicas, c.tol_prob,
        derive_stream_seed(seed, kCstarStream), 4000, c.threads);
    lambda0 =
        thr.lambda_star + c_star / std::sqrt(static_cast<double>(c.n));
    cstar_json = c_star;
  } else {
    lambda0 = c.lambda0.value_or(thr.lambda_star);
  }
  // Per-step regularity monitoring needs the variance sequence of the
  // supercritical start, so it switches off for subcritical lambda0. The
  // constants are the empirically calibrated good-set thresholds.
  GoodSetSpec good_set;
  if (lambda0 > 1.0) {
    good_set.K = 2000.0;
    good_set.v_dev_scale = 2.0;
    good_set.v_seq = surrogate_variance_sequence(64, c.q, beta, lambda0);
  }
  const auto results = run_replicas<ExitResult>(
      c.replicas, seed,
      [&](std::uint64_t, Rng& rng) {
        return run_cm_exit_replica(c.n, lambda0, params, thr.theta_star,
                                   c.gamma, max_steps, rng, &good_set);
      },
      c.threads);
  CsvWriter csv(fs::path(c.out_dir) / "results.csv",
                {"replica", "outcome", "exit_step", "good_set_violated"});
  ExitProbs probs;
  {
    std::uint64_t right = 0, left = 0, timeout = 0;
    Welford steps;
    for (std::size_t r = 0; r < results.size(); ++r) {
      csv.write_row({fmt(static_cast<std::uint64_t>(r)),
                     outcome_name(results[r].outcome), fmt(results[r].step),
                     good_set.K > 0.0
                         ? std::string(results[r].good_set_violated ? "1" : "0")
                         : std::string()});
      switch (results[r].outcome) {
        case ExitOutcome::Right: ++right; steps.add(results[r].step); break;
        case ExitOutcome::Left: ++left; steps.add(results[r].step); break;
        case ExitOutcome::Timeout: ++timeout; break;
      }
    }
    const double R = static_cast<double>(results.size());
    probs.replicas = results.size();
    probs.p_right = right / R;
    probs.p_left = left / R;
    probs.p_timeout = timeout / R;
    probs.se_right = binomial_se(probs.p_right, probs.replicas);
    probs.se_left = binomial_se(probs.p_left, probs.replicas);
    probs.se_timeout = binomial_se(probs.p_timeout, probs.replicas);
    probs.mean_exit_step = steps.count() ? steps.mean() : 0.0;
  }
  // Replayed trajectories: the ensemble consumed the same streams, so the
  // recorded paths are the paths those replicas actually took.
  const std::uint64_t stride =
      c.record_stride > 0 ? c.record_stride : 1;
  const auto traj_dir = trajectory_dir(c);
  for (std::uint64_t r = 0; r < std::min(c.trajectory_replicas, c.replicas);
       ++r) {
    Rng rng(seed, r);
    RcState state = init_product(c.n, lambda0, rng);
    CsvWriter traj(traj_dir / replica_file(r),
                   {"t", "L1", "L2", "R2_minus", "I1", "components",
                    "activated_vertices", "giant_activated"});
    const double center = thr.theta_star * static_cast<double>(c.n);
    const double half = c.gamma * std::sqrt(static_cast<double>(c.n));
    CmStepRecord rec{};
    for (std::uint64_t t = 0; t <= max_steps; ++t) {
      const auto st = component_stats(state.components);
      if (t % stride == 0 || t == max_steps)
        traj.write_row({fmt(t), fmt(st.L1), fmt(st.L2), fmt(st.R2_minus),
                        fmt(st.I1),
                        fmt(static_cast<std::uint64_t>(
                            state.components.sizes.size())),
                        fmt(rec.activated_vertices),
                        rec.giant_activated ? "1" : "0"});
      const double l1 = static_cast<double>(st.L1);
      if (l1 > center + half || l1 < center - half || t == max_steps) break;
      state = cm_step(state, params, rng, &rec);
    }
  }
  KindResult out;
  out.summary = exit_probs_json(probs);
  out.summary["lambda0"] = lambda0;
  out.summary["target_left"] = target;
  out.summary["max_steps"] = max_steps;
  if (good_set.K > 0.0) {
    std::uint64_t violations = 0;
    for (const auto& r : results) violations += r.good_set_violated;
    out.summary["good_set_violation_fraction"] =
        static_cast<double>(violations) / static_cast<double>(results.size());
  }
  if (!cstar_json.is_null()) out.summary["c_star"] = cstar_json;
  out.thresholds = json{{"rc", rc_thresholds_json(thr)}};
  out.assert_ok = probs.p_timeout <= c.assert_timeout_max;
  if (c.lambda0_auto_cstar || c.target_left >= 0.0)
    out.assert_ok =
        out.assert_ok && std::abs(probs.p_left - target) <= c.assert_p_tol;
  return out;
}

KindResult run_cm_mix(const ExperimentConfig& c, bool use_sw) {
  if (use_sw) integral_q(c.q, "sw-mix");
  const auto bt = beta_thresholds(c.q);
  const double beta = c.beta.value_or(bt.beta_c);
  const auto thr = rc_thresholds(c.q, beta);
  const ModelParams params{c.q, beta, c.n};
  const double lambda0 = c.lambda0.value_or(thr.lambda_star);
  const std::uint64_t seed = *c.seed;
  QuasiEqOptions opt;
  opt.horizon_coef = c.horizon_coef > 0.0 ? c.horizon_coef : 20.0;
  opt.max_steps = c.max_steps;
  struct Row {
    RcPhase phase;
    bool settled;
    std::uint64_t l1, l2, steps;
  };
  QuasiEqOptions ensemble_opt = opt;
  ensemble_opt.record_stride = ~0ULL;  // endpoints only; replays record fully
  const auto results = run_replicas<Row>(
      c.replicas, seed,
      [&](std::uint64_t, Rng& rng) {
        RcState state = init_product(c.n, lambda0, rng);
        const auto res =
            run_quasi_equilibration(state, params, thr, rng, ensemble_opt,
                                    use_sw);
        const auto& last = res.trajectory.back();
        return Row{res.phase, res.settled, last.L1, last.L2, last.t};
      },
      c.threads);
  CsvWriter csv(fs::path(c.out_dir) / "results.csv",
                {"replica", "phase", "settled", "final_L1", "final_L2",
                 "steps_run"});
  std::uint64_t ordered = 0, settled = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    ordered += results[r].phase == RcPhase::Ordered;
    settled += results[r].settled;
    csv.write_row({fmt(static_cast<std::uint64_t>(r)),
                   results[r].phase == RcPhase::Ordered ? "ordered"
                                                        : "disordered",
                   results[r].settled ? "1" : "0", fmt(results[r].l1),
                   fmt(results[r].l2), fmt(results[r].steps)});
  }
  const auto traj_dir = trajectory_dir(c);
  QuasiEqOptions replay_opt = opt;
  replay_opt.record_stride = c.record_stride > 0 ? c.record_stride : 1;
  for (std::uint64_t r = 0; r < std::min(c.trajectory_replicas, c.replicas);
       ++r) {
    Rng rng(seed, r);
    RcState state = init_product(c.n, lambda0, rng);
    const auto res =
        run_quasi_equilibration(state, params, thr, rng, replay_opt, use_sw);
    CsvWriter traj(traj_dir / replica_file(r),
                   {"t", "L1", "L2", "R2_minus", "I1", "components",
                    "activated_vertices", "giant_activated"});
    for (const auto& rec : res.trajectory)
      traj.write_row({fmt(rec.t), fmt(rec.L1), fmt(rec.L2), fmt(rec.R2_minus),
                      fmt(rec.I1), fmt(rec.components),
                      fmt(rec.activated_vertices),
                      rec.giant_activated ? "1" : "0"});
  }
  const double R = static_cast<double>(results.size());
  KindResult out;
  out.summary = {{"lambda0", lambda0},
                 {"ordered_fraction", ordered / R},
                 {"settled_fraction", settled / R},
                 {"replicas", c.replicas}};
  out.thresholds = json{{"rc", rc_thresholds_json(thr)}};
  out.assert_ok = settled / R >= c.assert_settled_min;
  return out;
}

KindResult run_potts_exit(const ExperimentConfig& c) {
  const std::size_t q = integral_q(c.q, "potts-exit");
  const auto bt = beta_thresholds(c.q);
  const double beta = c.beta.value_or(bt.beta_c);
  const auto pt = potts_thresholds_at(c.q, beta);
  const double target = c.target_left >= 0.0 ? c.target_left : xi_weight(c.q);
  const std::uint64_t max_steps =
      c.max_steps > 0 ? c.max_steps : 400 * c.n;
  const std::uint64_t seed = *c.seed;
  double m0;
  json cstar_json;
  if (c.m0_auto_cstar) {
    const double c_hat = find_c_star_potts(
        target, c.q, beta, c.gamma, c.dt, c.sde_replicas, c.tol_prob,
        derive_stream_seed(seed, kCstarStream), c.threads);
    m0 = pt.m_star + c_hat / std::sqrt(static_cast<double>(c.n));
    cstar_json = c_hat;
  } else {
    m0 = c.m0.value_or(pt.m_star);
  }
  struct Res {
    ExitResult exit;
    std::size_t dominant;
  };
  const auto results = run_replicas<Res>(
      c.replicas, seed,
      [&](std::uint64_t, Rng& rng) {
        const auto init = init_hat_nu(c.n, q, m0, rng);
        const auto times =
            saddle_exit_times_potts(init.state, init.dominant, beta,
                                    pt.m_star, c.gamma, max_steps, rng);
        ExitResult e;
        if (times.tau_plus)
          e = {ExitOutcome::Right, *times.tau_plus};
        else if (times.tau_minus)
          e = {ExitOutcome::Left, *times.tau_minus};
        else
          e = {ExitOutcome::Timeout, max_steps};
        return Res{e, init.dominant};
      },
      c.threads);
  CsvWriter csv(fs::path(c.out_dir) / "results.csv",
                {"replica", "outcome", "exit_step", "dominant"});
  ExitProbs probs;
  {
    std::uint64_t right = 0, left = 0, timeout = 0;
    Welford steps;
    for (std::size_t r = 0; r < results.size(); ++r) {
      csv.write_row({fmt(static_cast<std::uint64_t>(r)),
                     outcome_name(results[r].exit.outcome),
                     fmt(results[r].exit.step),
                     fmt(static_cast<std::uint64_t>(results[r].dominant))});
      switch (results[r].exit.outcome) {
        case ExitOutcome::Right: ++right; steps.add(results[r].exit.step); break;
        case ExitOutcome::Left: ++left; steps.add(results[r].exit.step); break;
        case ExitOutcome::Timeout: ++timeout; break;
      }
    }
    const double R = static_cast<double>(results.size());
    probs.replicas = results.size();
    probs.p_right = right / R;
    probs.p_left = left / R;
    probs.p_timeout = timeout / R;
    probs.se_right = binomial_se(probs.p_right, probs.replicas);
    probs.se_left = binomial_se(probs.p_left, probs.replicas);
    probs.se_timeout = binomial_se(probs.p_timeout, probs.replicas);
    probs.mean_exit_step = steps.count() ? steps.mean() : 0.0;
  }
  const std::uint64_t stride = c.record_stride > 0 ? c.record_stride : c.n;
  const auto traj_dir = trajectory_dir(c);
  for (std::uint64_t r = 0; r < std::min(c.trajectory_replicas, c.replicas);
       ++r) {
    Rng rng(seed, r);
    const auto init = init_hat_nu(c.n, q, m0, rng);
    CountVector state = init.state;
    std::vector<std::string> header = {"t"};
    for (std::size_t k = 0; k < q; ++k)
      header.push_back("count_" + std::to_string(k));
    CsvWriter traj(traj_dir / replica_file(r), header);
    const double half = c.gamma / std::sqrt(static_cast<double>(c.n));
    for (std::uint64_t t = 0; t <= max_steps; ++t) {
      if (t % stride == 0 || t == max_steps) {
        std::vector<std::string> row = {fmt(t)};
        for (auto cnt : state.counts) row.push_back(fmt(cnt));
        traj.write_row(row);
      }
      const double s_dom = static_cast<double>(state.counts[init.dominant]) /
                           static_cast<double>(c.n);
      if (s_dom > pt.m_star + half || s_dom < pt.m_star - half ||
          t == max_steps)
        break;
      glauber_step(state, beta, rng);
    }
  }
  KindResult out;
  out.summary = exit_probs_json(probs);
  out.summary["m0"] = m0;
  out.summary["target_left"] = target;
  out.summary["max_steps"] = max_steps;
  if (!cstar_json.is_null()) out.summary["c_hat_star"] = cstar_json;
  out.thresholds = json{{"potts", potts_thresholds_json(pt)}};
  out.assert_ok = probs.p_timeout <= c.assert_timeout_max;
  if (c.m0_auto_cstar || c.target_left >= 0.0)
    out.assert_ok =
        out.assert_ok && std::abs(probs.p_left - target) <= c.assert_p_tol;
  return out;
}

KindResult run_potts_mix(const ExperimentConfig& c) {
  const std::size_t q = integral_q(c.q, "potts-mix");
  const auto bt = beta_thresholds(c.q);
  const double beta = c.beta.value_or(bt.beta_c);
  const auto pt = potts_thresholds_at(c.q, beta);
  const double m0 = c.m0.value_or(1.0 / c.q);
  const std::uint64_t seed = *c.seed;
  PottsRunOptions opt;
  opt.horizon_coef = c.horizon_coef > 0.0 ? c.horizon_coef : 30.0;
  opt.max_steps = c.max_steps;
  opt.record_stride = c.record_stride > 0 ? c.record_stride : c.n;
  opt.classify_tol = c.classify_tol;
  struct Res {
    PottsRunResult run;
    std::size_t dominant;
  };
  const auto results = run_replicas<Res>(
      c.replicas, seed,
      [&](std::uint64_t, Rng& rng) {
        const auto init = init_hat_nu(c.n, q, m0, rng);
        return Res{run_potts_quasi_equilibration(init.state, init.dominant,
                                                 beta, pt, rng, opt),
                   init.dominant};
      },
      c.threads);
  std::vector<std::string> header = {"replica", "phase",   "color",
                                     "steps_run", "max_gap"};
  for (std::size_t k = 0; k < q; ++k)
    header.push_back("count_" + std::to_string(k));
  CsvWriter csv(fs::path(c.out_dir) / "results.csv", header);
  std::uint64_t disordered = 0, ordered = 0, unsettled = 0;
  std::vector<std::uint64_t> color_wins(q, 0);
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& run = results[r].run;
    const char* phase = "unsettled";
    if (run.phase.kind == PottsPhaseResult::Kind::Disordered) {
      phase = "disordered";
      ++disordered;
    } else if (run.phase.kind == PottsPhaseResult::Kind::Ordered) {
      phase = "ordered";
      ++ordered;
      ++color_wins[run.phase.color];
    } else {
      ++unsettled;
    }
    std::vector<std::string> row = {
        fmt(static_cast<std::uint64_t>(r)), phase,
        fmt(static_cast<std::uint64_t>(run.phase.color)), fmt(run.steps_run),
        fmt(run.max_gap_tracked)};
    for (auto cnt : run.trajectory.back().counts) row.push_back(fmt(cnt));
    csv.write_row(row);
  }
  const auto traj_dir = trajectory_dir(c);
  for (std::uint64_t r = 0; r < std::min(c.trajectory_replicas, c.replicas);
       ++r) {
    std::vector<std::string> theader = {"t"};
    for (std::size_t k = 0; k < q; ++k)
      theader.push_back("count_" + std::to_string(k));
    CsvWriter traj(traj_dir / replica_file(r), theader);
    for (const auto& rec : results[r].run.trajectory) {
      std::vector<std::string> row = {fmt(rec.t)};
      for (auto cnt : rec.counts) row.push_back(fmt(cnt));
      traj.write_row(row);
    }
  }
  const double R = static_cast<double>(results.size());
  KindResult out;
  out.summary = {{"m0", m0},
                 {"disordered_fraction", disordered / R},
                 {"ordered_fraction", ordered / R},
                 {"unsettled_fraction", unsettled / R},
                 {"color_wins", color_wins},
                 {"replicas", c.replicas}};
  if (ordered > 0) {
    out.summary["color_chi2"] = chi2_uniform_stat(color_wins);
    out.summary["color_chi2_99"] =
        chi2_quantile_99(static_cast<int>(q) - 1);
  }
  out.thresholds = json{{"potts", potts_thresholds_json(pt)}};
  out.assert_ok = (disordered + ordered) / R >= c.assert_settled_min;
  return out;
}

KindResult run_surrogate_cstar(const ExperimentConfig& c) {
  const double target = c.target_left >= 0.0 ? c.target_left : xi_weight(c.q);
  const std::uint64_t max_steps = c.max_steps > 0 ? c.max_steps : 4000;
  const std::uint64_t seed = *c.seed;
  const double c_star = find_c_star_rc(target, c.q, c.gamma, c.replicas,
                                       c.tol_prob, seed, max_steps,
                                       c.threads);
  auto params = make_surrogate_params(c.q, c_star);
  const auto probs =
      zbar_exit_prob(params, c.gamma, c.replicas, max_steps, seed, c.threads);
  CsvWriter csv(fs::path(c.out_dir) / "results.csv",
                {"c_star", "target_left", "p_left", "se_left", "p_timeout",
                 "replicas"});
  csv.write_row({fmt(c_star), fmt(target), fmt(probs.p_left),
                 fmt(probs.se_left), fmt(probs.p_timeout), fmt(c.replicas)});
  KindResult out;
  out.summary = exit_probs_json(probs);
  out.summary["c_star"] = c_star;
  out.summary["target_left"] = target;
  out.thresholds =
      json{{"rc", rc_thresholds_json(rc_thresholds(c.q,
                                                   beta_thresholds(c.q).beta_c))}};
  out.assert_ok = std::abs(probs.p_left - target) <=
                  c.tol_prob + 2.0 * probs.se_left;
  return out;
}

KindResult run_verify_exact(const ExperimentConfig& c) {
  struct Check {
    std::string name;
    double value;
    double bound;
    bool require_below;
  };
  std::vector<Check> checks;
  const double beta = c.beta.value_or(1.3);
  for (const auto& [n, q] : std::vector<std::pair<std::size_t, double>>{
           {2, 2.0}, {3, 3.0}, {4, 1.5}, {4, 3.0}}) {
    checks.push_back({"cm_stationary_n" + std::to_string(n) + "_q" + fmt(q),
                      cm_exact_kernel_check(n, beta, q),
                      c.assert_residual_max, true});
  }
  for (const auto& [n, q] : std::vector<std::pair<std::size_t, double>>{
           {4, 2.0}, {4, 3.0}}) {
    checks.push_back({"sw_stationary_n" + std::to_string(n) + "_q" + fmt(q),
                      sw_exact_kernel_check(n, beta, q),
                      c.assert_residual_max, true});
  }
  for (double b : {0.0, 1.7, 3.5}) {
    checks.push_back({"glauber_balance_beta" + fmt(b),
                      glauber_balance_check(6, 3, b, true),
                      c.assert_residual_max, true});
  }
  checks.push_back({"glauber_no_self_exclusion_beta1.7",
                    glauber_balance_check(6, 3, 1.7, false), 1e-6, false});
  CsvWriter csv(fs::path(c.out_dir) / "results.csv",
                {"check", "value", "bound", "direction", "pass"});
  bool all_pass = true;
  double worst = 0.0;
  for (const auto& ch : checks) {
    const bool pass =
        ch.require_below ? ch.value <= ch.bound : ch.value >= ch.bound;
    all_pass = all_pass && pass;
    if (ch.require_below) worst = std::max(worst, ch.value);
    csv.write_row({ch.name, fmt(ch.value), fmt(ch.bound),
                   ch.require_below ? "below" : "above", pass ? "1" : "0"});
  }
  KindResult out;
  out.summary = {{"checks", checks.size()},
                 {"all_pass", all_pass},
                 {"worst_residual", worst}};
  out.assert_ok = all_pass;
  return out;
}

json config_json(const ExperimentConfig& c) {
  json j{{"kind", c.kind},
         {"q", c.q},
         {"n", c.n},
         {"gamma", c.gamma},
         {"replicas", c.replicas},
         {"max_steps", c.max_steps},
         {"out_dir", c.out_dir},
         {"threads", c.threads},
         {"record_stride", c.record_stride},
         {"trajectory_replicas", c.trajectory_replicas},
         {"target_left", c.target_left},
         {"tol_prob", c.tol_prob},
         {"dt", c.dt},
         {"sde_replicas", c.sde_replicas},
         {"horizon_coef", c.horizon_coef},
         {"classify_tol", c.classify_tol},
         {"assert_mode", c.assert_mode}};
  if (c.beta) j["beta"] = *c.beta;
  if (c.seed) j["seed"] = *c.seed;
  if (c.lambda0) j["lambda0"] = *c.lambda0;
  if (c.lambda0_auto_cstar) j["lambda0"] = "auto-cstar";
  if (c.m0) j["m0"] = *c.m0;
  if (c.m0_auto_cstar) j["m0"] = "auto-cstar";
  return j;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config_in) {
  ExperimentConfig config = config_in;
  validate_config(config);
  config.threads = resolve_threads(config.threads);
  fs::create_directories(config.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  KindResult kr;
  if (config.kind == "thresholds") kr = run_thresholds(config);
  else if (config.kind == "cm-exit") kr = run_cm_exit(config);
  else if (config.kind == "cm-mix") kr = run_cm_mix(config, false);
  else if (config.kind == "sw-mix") kr = run_cm_mix(config, true);
  else if (config.kind == "potts-exit") kr = run_potts_exit(config);
  else if (config.kind == "potts-mix") kr = run_potts_mix(config);
  else if (config.kind == "surrogate-cstar") kr = run_surrogate_cstar(config);
  else if (config.kind == "verify-exact") kr = run_verify_exact(config);
  else throw ConfigError("unknown experiment kind '" + config.kind + "'");
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  json manifest{{"version", kVersion},
                {"csv_schema", kCsvSchema},
                {"kind", config.kind},
                {"config", config_json(config)},
                {"thresholds", kr.thresholds},
                {"summary", kr.summary},
                {"assert_ok", kr.assert_ok},
                {"wall_seconds", wall}};
  const fs::path manifest_path = fs::path(config.out_dir) / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw ConfigError("cannot write " + manifest_path.string());
  out << manifest.dump(2) << "\n";
  ExperimentOutcome outcome;
  outcome.manifest_path = manifest_path.string();
  outcome.exit_code = config.assert_mode && !kr.assert_ok ? 3 : 0;
  return outcome;
}

}  // namespace mixer::cli
