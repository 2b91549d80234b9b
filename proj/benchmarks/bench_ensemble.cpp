// Ensemble throughput: the OpenMP replica driver against the serial
// reference on identical workloads. Results must agree bit for bit; the
// timing lines are informational.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>
#include <vector>

#include "mixer/cm_dynamics.hpp"
#include "mixer/phase_diagram.hpp"
#include "mixer/replica.hpp"
#include "mixer/rng.hpp"
#include "mixer/surrogate.hpp"

#define REQUIRE(cond)                                          \
  do {                                                         \
    if (!(cond)) {                                             \
      std::fprintf(stderr, "[FAIL] %s:%d: %s\n", __FILE__,     \
                   __LINE__, #cond);                           \
      std::exit(1);                                            \
    }                                                          \
  } while (0)

namespace {

using namespace mixer;

double now_seconds() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

template <class Result, class Work>
void bench(const char* name, std::uint64_t replicas, Work&& work) {
  const double t0 = now_seconds();
  const auto serial = run_replicas_serial<Result>(replicas, 97, work);
  const double serial_secs = now_seconds() - t0;
  const double t1 = now_seconds();
  const auto parallel = run_replicas<Result>(replicas, 97, work);
  const double parallel_secs = now_seconds() - t1;
  REQUIRE(serial == parallel);
  std::printf("%-22s replicas=%llu serial=%.3fs parallel=%.3fs speedup=%.2fx\n",
              name, static_cast<unsigned long long>(replicas), serial_secs,
              parallel_secs, serial_secs / parallel_secs);
}

}  // namespace

int main() {
  const auto thr = rc_thresholds(3.0, beta_thresholds(3.0).beta_c);
  const std::uint64_t n = 20000;
  const ModelParams params{3.0, thr.beta_c, n};

  bench<std::pair<int, std::uint64_t>>(
      "cm-critical-exit", 64, [&](std::uint64_t, Rng& rng) {
        const auto r = run_cm_exit_replica(n, thr.lambda_star, params,
                                           thr.theta_star, 6.0, 400, rng);
        return std::pair<int, std::uint64_t>(static_cast<int>(r.outcome),
                                             r.step);
      });

  const auto zp = make_surrogate_params(3.0, 0.0);
  bench<std::pair<int, std::uint64_t>>(
      "surrogate-exit", 20000, [&](std::uint64_t, Rng& rng) {
        const double z0 =
            zp.init_mean + std::sqrt(zp.init_variance) * rng.normal();
        const auto r = zbar_run(z0, zp, 8.0, 4000, rng);
        return std::pair<int, std::uint64_t>(static_cast<int>(r.outcome),
                                             r.step);
      });

  std::printf("ok\n");
  return 0;
}
