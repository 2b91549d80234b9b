#include "config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "mixer/errors.hpp"

namespace mixer::cli {

using nlohmann::json;

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "thresholds",  "cm-exit",   "cm-mix",          "sw-mix",
      "potts-exit",  "potts-mix", "surrogate-cstar", "verify-exact"};
  return kinds;
}

namespace {

double expect_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number())
    throw ConfigError("config field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::uint64_t expect_u64(const json& j, const std::string& key) {
  if (!j.at(key).is_number_unsigned())
    throw ConfigError("config field '" + key +
                      "' must be a non-negative integer");
  return j.at(key).get<std::uint64_t>();
}

// lambda0 / m0 accept a number or the string "auto-cstar".
void read_start_point(const json& j, const std::string& key,
                      std::optional<double>& value, bool& auto_cstar) {
  const auto& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() != "auto-cstar")
      throw ConfigError("config field '" + key +
                        "' must be a number or \"auto-cstar\"");
    auto_cstar = true;
  } else if (v.is_number()) {
    value = v.get<double>();
  } else {
    throw ConfigError("config field '" + key +
                      "' must be a number or \"auto-cstar\"");
  }
}

}  // namespace

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  static const std::set<std::string> known = {
      "kind",          "q",           "beta",
      "n",             "lambda0",     "m0",
      "gamma",         "replicas",    "max_steps",
      "seed",          "out_dir",     "threads",
      "record_stride", "trajectory_replicas",
      "target_left",   "tol_prob",    "dt",
      "sde_replicas",  "horizon_coef", "classify_tol",
      "assert_timeout_max", "assert_p_tol", "assert_settled_min",
      "assert_residual_max"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");

  ExperimentConfig c;
  if (j.contains("kind")) {
    if (!j.at("kind").is_string())
      throw ConfigError("config field 'kind' must be a string");
    c.kind = j.at("kind").get<std::string>();
  }
  if (j.contains("q")) c.q = expect_number(j, "q");
  if (j.contains("beta")) c.beta = expect_number(j, "beta");
  if (j.contains("n")) c.n = expect_u64(j, "n");
  if (j.contains("lambda0"))
    read_start_point(j, "lambda0", c.lambda0, c.lambda0_auto_cstar);
  if (j.contains("m0")) read_start_point(j, "m0", c.m0, c.m0_auto_cstar);
  if (j.contains("gamma")) c.gamma = expect_number(j, "gamma");
  if (j.contains("replicas")) c.replicas = expect_u64(j, "replicas");
  if (j.contains("max_steps")) c.max_steps = expect_u64(j, "max_steps");
  if (j.contains("seed")) c.seed = expect_u64(j, "seed");
  if (j.contains("out_dir")) {
    if (!j.at("out_dir").is_string())
      throw ConfigError("config field 'out_dir' must be a string");
    c.out_dir = j.at("out_dir").get<std::string>();
  }
  if (j.contains("threads"))
    c.threads = static_cast<int>(expect_u64(j, "threads"));
  if (j.contains("record_stride")) c.record_stride = expect_u64(j, "record_stride");
  if (j.contains("trajectory_replicas"))
    c.trajectory_replicas = expect_u64(j, "trajectory_replicas");
  if (j.contains("target_left")) c.target_left = expect_number(j, "target_left");
  if (j.contains("tol_prob")) c.tol_prob = expect_number(j, "tol_prob");
  if (j.contains("dt")) c.dt = expect_number(j, "dt");
  if (j.contains("sde_replicas")) c.sde_replicas = expect_u64(j, "sde_replicas");
  if (j.contains("horizon_coef")) c.horizon_coef = expect_number(j, "horizon_coef");
  if (j.contains("classify_tol")) c.classify_tol = expect_number(j, "classify_tol");
  if (j.contains("assert_timeout_max"))
    c.assert_timeout_max = expect_number(j, "assert_timeout_max");
  if (j.contains("assert_p_tol")) c.assert_p_tol = expect_number(j, "assert_p_tol");
  if (j.contains("assert_settled_min"))
    c.assert_settled_min = expect_number(j, "assert_settled_min");
  if (j.contains("assert_residual_max"))
    c.assert_residual_max = expect_number(j, "assert_residual_max");
  return c;
}

void validate_config(const ExperimentConfig& c) {
  const auto& kinds = experiment_kinds();
  bool known_kind = false;
  for (const auto& k : kinds) known_kind = known_kind || k == c.kind;
  if (!known_kind) throw ConfigError("unknown experiment kind '" + c.kind + "'");
  if (!(c.q > 2.0))
    throw ConfigError("config field 'q' must exceed 2");
  if (c.n == 0) throw ConfigError("config field 'n' must be positive");
  if (c.replicas == 0)
    throw ConfigError("config field 'replicas' must be positive");
  if (!(c.gamma > 0.0)) throw ConfigError("config field 'gamma' must be positive");
  if (!(c.dt > 0.0) || c.dt > 1e-3 + 1e-15)
    throw ConfigError("config field 'dt' must be in (0, 1e-3]");
  const bool deterministic_kind =
      c.kind == "thresholds" || c.kind == "verify-exact";
  if (!deterministic_kind && !c.seed)
    throw ConfigError("stochastic experiment kind '" + c.kind +
                      "' requires an explicit seed");
  if (c.lambda0 && c.lambda0_auto_cstar)
    throw ConfigError("'lambda0' cannot be both a number and auto-cstar");
  if (c.m0 && c.m0_auto_cstar)
    throw ConfigError("'m0' cannot be both a number and auto-cstar");
  if (c.target_left >= 0.0 &&
      !(c.target_left > 0.0 && c.target_left < 1.0))
    throw ConfigError("config field 'target_left' must be in (0,1)");
}

}  // namespace mixer::cli
