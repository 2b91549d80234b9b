#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mixer::cli {

// One experiment = one config. Field defaults are the kind-agnostic ones;
// zero/empty sentinels are resolved per kind in experiments.cpp.
struct ExperimentConfig {
  std::string kind;
  double q = 3.0;
  std::optional<double> beta;     // default: beta_c(q)
  std::uint64_t n = 100000;
  std::optional<double> lambda0;  // cm kinds; default: lambda_star
  bool lambda0_auto_cstar = false;
  std::optional<double> m0;  // potts kinds; default: m_star
  bool m0_auto_cstar = false;
  double gamma = 8.0;
  std::uint64_t replicas = 100;
  std::uint64_t max_steps = 0;     // 0 -> kind default
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int threads = 0;                 // 0 -> all (capped by MIXER_THREADS)
  std::uint64_t record_stride = 0; // 0 -> kind default
  std::uint64_t trajectory_replicas = 4;
  double target_left = -1.0;       // -1 -> xi(q)
  double tol_prob = 0.02;
  double dt = 1e-3;
  std::uint64_t sde_replicas = 1500;
  double horizon_coef = 0.0;       // 0 -> kind default
  double classify_tol = 0.1;
  bool assert_mode = false;
  double assert_timeout_max = 0.02;
  double assert_p_tol = 0.07;
  double assert_settled_min = 0.95;
  double assert_residual_max = 1e-12;
};

const std::vector<std::string>& experiment_kinds();

// Parses a JSON config file. ConfigError names the offending field.
ExperimentConfig load_config_file(const std::string& path);

// Kind-specific consistency checks; every stochastic kind must have a
// seed ("no silent entropy"). ConfigError on violation.
void validate_config(const ExperimentConfig& config);

}  // namespace mixer::cli
