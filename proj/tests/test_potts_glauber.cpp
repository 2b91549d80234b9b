#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mixer/errors.hpp"
#include "mixer/potts_glauber.hpp"
#include "mixer/stats.hpp"

using namespace mixer;

namespace {
constexpr double kBetaC3 = 2.7725887222397812;  // 4 ln 2

std::uint64_t total(const CountVector& s) {
  return std::accumulate(s.counts.begin(), s.counts.end(),
                         std::uint64_t{0});
}
}  // namespace

TEST_CASE("hat-nu initialization concentrates on the dominant color") {
  Rng rng(1);
  const std::uint64_t n = 9000;
  const auto init = init_hat_nu(n, 3, 0.5, rng);
  REQUIRE(init.state.counts.size() == 3);
  CHECK(init.state.n == n);
  CHECK(total(init.state) == n);
  REQUIRE(init.dominant < 3);
  const double dom = init.state.counts[init.dominant] /
                     static_cast<double>(n);
  CHECK(std::abs(dom - 0.5) < 5.0 * binomial_se(0.5, n));
  for (std::size_t k = 0; k < 3; ++k) {
    if (k == init.dominant) continue;
    const double other = init.state.counts[k] / static_cast<double>(n);
    CHECK(std::abs(other - 0.25) < 5.0 * binomial_se(0.25, n));
  }
  CHECK_THROWS_AS(init_hat_nu(n, 3, 0.2, rng), DomainError);
  CHECK_THROWS_AS(init_hat_nu(n, 3, 1.1, rng), DomainError);
}

TEST_CASE("dominant color choice is uniform across replicas") {
  Rng rng(2);
  std::vector<std::uint64_t> wins(3, 0);
  for (int r = 0; r < 3000; ++r)
    ++wins[init_hat_nu(30, 3, 0.6, rng).dominant];
  CHECK(chi2_uniform_stat(wins) < chi2_quantile_99(2));
}

TEST_CASE("steps conserve mass and move one vertex at a time") {
  Rng rng(3);
  auto init = init_hat_nu(500, 3, 0.6, rng);
  for (int t = 0; t < 200; ++t) {
    const auto before = init.state.counts;
    glauber_step(init.state, 2.9, rng);
    CHECK(total(init.state) == 500);
    std::uint64_t moved = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto d = init.state.counts[k] > before[k]
                         ? init.state.counts[k] - before[k]
                         : before[k] - init.state.counts[k];
      moved += d;
    }
    CHECK(moved <= 2);  // 0 when the vertex keeps its color, else 1+1
  }
}

TEST_CASE("infinite-temperature relaxation follows the exact mean curve") {
  // At beta = 0 colors resample uniformly: from all vertices in color 0,
  // E[c_0(t)]/n = 1/q + (1 - 1/q)(1 - 1/n)^t.
  Rng rng(4);
  const std::uint64_t n = 6000;
  CountVector state{{n, 0, 0}, n};
  const std::uint64_t t = 3 * n;
  glauber_steps(state, 0.0, t, rng);
  const double expected =
      1.0 / 3.0 + (2.0 / 3.0) * std::pow(1.0 - 1.0 / n, double(t));
  CHECK(std::abs(state.counts[0] / static_cast<double>(n) - expected) < 0.03);
}

TEST_CASE("keyed step is equivariant under color permutation") {
  const double beta = 2.9;
  // sigma maps color j to (j+1) mod 3, applied jointly to counts and races.
  const auto sigma = [](std::size_t j) { return (j + 1) % 3; };
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    CountVector a{{17, 9, 4}, 30};
    CountVector b{{0, 0, 0}, 30};
    std::vector<double> pick(3), fresh(3), pick_p(3), fresh_p(3);
    for (std::size_t j = 0; j < 3; ++j) {
      pick[j] = rng.unit();
      fresh[j] = rng.unit();
      b.counts[sigma(j)] = a.counts[j];
      pick_p[sigma(j)] = pick[j];
      fresh_p[sigma(j)] = fresh[j];
    }
    const auto [k1, j1] = glauber_step_keyed(a, beta, pick, fresh);
    const auto [k2, j2] = glauber_step_keyed(b, beta, pick_p, fresh_p);
    CHECK(k2 == sigma(k1));
    CHECK(j2 == sigma(j1));
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(b.counts[sigma(j)] == a.counts[j]);
  }
}

TEST_CASE("keyed step matches the exact heat-bath pair law") {
  // P(pick k) = c_k/n and P(new j | k) proportional to
  // exp((beta/n)(c_j - [j == k])); check the 3x3 pair frequencies of the
  // race construction against those exact values.
  const CountVector base{{12, 6, 2}, 20};
  const double beta = 1.8;
  const double bn = beta / 20.0;
  Rng rng(6);
  const int N = 120000;
  std::vector<std::vector<std::uint64_t>> hits(3,
                                               std::vector<std::uint64_t>(3));
  for (int r = 0; r < N; ++r) {
    CountVector s = base;
    std::vector<double> pick(3), fresh(3);
    for (auto& u : pick) u = rng.unit();
    for (auto& u : fresh) u = rng.unit();
    const auto [k, j] = glauber_step_keyed(s, beta, pick, fresh);
    ++hits[k][j];
  }
  for (std::size_t k = 0; k < 3; ++k) {
    double w[3], tot = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      w[j] = std::exp(
          bn * (static_cast<double>(base.counts[j]) - (j == k ? 1.0 : 0.0)));
      tot += w[j];
    }
    for (std::size_t j = 0; j < 3; ++j) {
      const double p = (base.counts[k] / 20.0) * w[j] / tot;
      const double emp = hits[k][j] / static_cast<double>(N);
      CHECK(std::abs(emp - p) < 5.0 * binomial_se(p, N) + 1e-12);
    }
  }
}

TEST_CASE("saddle exit stops at the first boundary crossing") {
  const std::uint64_t n = 4000;
  {
    Rng rng(7);
    auto init = init_hat_nu(n, 3, 0.62, rng);
    const auto times = saddle_exit_times_potts(init.state, init.dominant,
                                               kBetaC3, 0.5, 5.0, 1000, rng);
    REQUIRE(times.tau_plus.has_value());
    CHECK(*times.tau_plus == 0);
    CHECK_FALSE(times.tau_minus.has_value());
  }
  {
    Rng rng(8);
    auto init = init_hat_nu(n, 3, 0.38, rng);
    const auto times = saddle_exit_times_potts(init.state, init.dominant,
                                               kBetaC3, 0.5, 5.0, 1000, rng);
    REQUIRE(times.tau_minus.has_value());
    CHECK(*times.tau_minus == 0);
  }
  {
    Rng rng(9);
    auto init = init_hat_nu(n, 3, 0.5, rng);
    const auto times = saddle_exit_times_potts(init.state, init.dominant,
                                               kBetaC3, 0.5, 400.0, 500, rng);
    CHECK_FALSE(times.tau_plus.has_value());
    CHECK_FALSE(times.tau_minus.has_value());
    CHECK(times.steps_run == 500);
  }
}

TEST_CASE("coordinate gap ranges over the non-excluded colors") {
  const CountVector s{{10, 20, 30}, 60};
  CHECK(std::abs(coordinate_gap(s, 2) - 10.0 / 60.0) < 1e-15);
  CHECK(std::abs(coordinate_gap(s, 0) - 10.0 / 60.0) < 1e-15);
  CHECK(std::abs(coordinate_gap(s, std::nullopt) - 20.0 / 60.0) < 1e-15);
}

TEST_CASE("phase classification on count vectors") {
  const auto thr = potts_thresholds_at(3.0, kBetaC3);  // m_r = 2/3
  const std::uint64_t n = 9000;
  CHECK(classify_potts_phase({{3000, 3000, 3000}, n}, thr).kind ==
        PottsPhaseResult::Kind::Disordered);
  const auto ordered = classify_potts_phase({{1500, 6000, 1500}, n}, thr);
  CHECK(ordered.kind == PottsPhaseResult::Kind::Ordered);
  CHECK(ordered.color == 1);
  CHECK(classify_potts_phase({{4500, 2250, 2250}, n}, thr).kind ==
        PottsPhaseResult::Kind::Unsettled);
}

TEST_CASE("quasi-equilibration picks the attracting branch") {
  {
    // beta > beta_s: the uniform point repels, an ordered start wins fast.
    const auto thr = potts_thresholds_at(3.0, 3.2);
    Rng rng(10);
    const std::uint64_t n = 3000;
    const auto init = init_hat_nu(n, 3, 0.55, rng);
    const auto res = run_potts_quasi_equilibration(init.state, init.dominant,
                                                   3.2, thr, rng);
    CHECK(res.phase.kind == PottsPhaseResult::Kind::Ordered);
    CHECK(res.phase.color == init.dominant);
    CHECK(res.trajectory.back().t == res.steps_run);
    const auto& final_counts = res.trajectory.back().counts;
    CHECK(std::abs(final_counts[init.dominant] / static_cast<double>(n) -
                   thr.m_r) < 0.1);
    // Minor colors stay balanced while the dominant one grows.
    CHECK(res.max_gap_tracked < 0.2);
  }
  {
    // Inside the window from the uniform start: disordered and attracting.
    const auto thr = potts_thresholds_at(3.0, 2.76);
    Rng rng(11);
    const auto init = init_hat_nu(3000, 3, 1.0 / 3.0, rng);
    const auto res = run_potts_quasi_equilibration(init.state, init.dominant,
                                                   2.76, thr, rng);
    CHECK(res.phase.kind == PottsPhaseResult::Kind::Disordered);
  }
}

TEST_CASE("deterministic flow lands on the scalar fixed point") {
  const double beta = 3.2;
  const auto fp = potts_fixed_points(beta, 3.0);
  const auto traj =
      deterministic_flow({0.5, 0.25, 0.25}, beta, 3.0, 40000, 1000.0);
  REQUIRE(traj.size() == 40001);
  const auto& last = traj.back();
  CHECK(std::abs(last[0] - fp.m_r) < 1e-6);
  CHECK(std::abs(last[1] - (1.0 - fp.m_r) / 2.0) < 1e-6);
  for (const auto& s : {traj.front(), traj[20000], traj.back()})
    CHECK(std::abs(s[0] + s[1] + s[2] - 1.0) < 1e-12);
}

TEST_CASE("deterministic flow keeps the uniform point fixed") {
  const auto traj = deterministic_flow({1.0 / 3, 1.0 / 3, 1.0 / 3}, 2.9, 3.0,
                                       1000, 500.0);
  for (double v : traj.back()) CHECK(std::abs(v - 1.0 / 3.0) < 1e-12);
}
