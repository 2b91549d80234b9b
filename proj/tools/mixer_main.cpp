#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/experiments.hpp"
#include "mixer/errors.hpp"
#include "mixer/version.hpp"

namespace {

struct Opts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 0;
  std::uint64_t n = 0;
  double beta = 0.0;
  double q = 0.0;
  double gamma = 0.0;
  std::string lambda0;
  std::string m0;
  std::uint64_t max_steps = 0;
  int threads = 0;
  std::uint64_t stride = 0;
  std::uint64_t trajectory_replicas = 0;
  double target_left = 0.0;
  double tol_prob = 0.0;
  double dt = 0.0;
  std::uint64_t sde_replicas = 0;
  bool assert_mode = false;
};

void add_options(CLI::App* sub, Opts& o) {
  sub->add_option("--config", o.config_path, "JSON config file");
  sub->add_option("--seed", o.seed, "master seed (uint64)");
  sub->add_option("--replicas", o.replicas, "independent replicas");
  sub->add_option("--out", o.out_dir, "output directory");
  sub->add_option("--n", o.n, "system size");
  sub->add_option("--q", o.q, "number of states (real, > 2)");
  sub->add_option("--beta", o.beta, "inverse temperature");
  sub->add_option("--gamma", o.gamma, "exit window half-width, sqrt(n) units");
  sub->add_option("--lambda0", o.lambda0,
                  "initial mean degree, or \"auto-cstar\"");
  sub->add_option("--m0", o.m0,
                  "initial dominant proportion, or \"auto-cstar\"");
  sub->add_option("--max-steps", o.max_steps, "step budget per replica");
  sub->add_option("--threads", o.threads, "worker threads (0 = all)");
  sub->add_option("--stride", o.stride, "trajectory record stride");
  sub->add_option("--trajectory-replicas", o.trajectory_replicas,
                  "replicas with full trajectory CSVs");
  sub->add_option("--target-left", o.target_left,
                  "target left-exit probability");
  sub->add_option("--tol-prob", o.tol_prob, "probability tolerance");
  sub->add_option("--dt", o.dt, "SDE time step");
  sub->add_option("--sde-replicas", o.sde_replicas,
                  "replicas per c* search evaluation");
  sub->add_flag("--assert", o.assert_mode,
                "exit 3 when result checks fail");
}

// --lambda0 / --m0 take a number or the literal "auto-cstar".
void apply_start_point(const std::string& text, const char* name,
                       std::optional<double>& value, bool& auto_cstar) {
  value.reset();
  auto_cstar = false;
  if (text == "auto-cstar") {
    auto_cstar = true;
    return;
  }
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw mixer::ConfigError(std::string(name) +
                             " must be a number or \"auto-cstar\"");
  value = x;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field cluster and Potts dynamics toolkit"};
  app.set_version_flag("--version", std::string("mixer ") + mixer::kVersion);
  app.require_subcommand(1);

  std::map<std::string, std::pair<CLI::App*, std::shared_ptr<Opts>>> subs;
  for (const auto& kind : mixer::cli::experiment_kinds()) {
    auto opts = std::make_shared<Opts>();
    CLI::App* sub =
        app.add_subcommand(kind, "run the '" + kind + "' experiment");
    add_options(sub, *opts);
    subs.emplace(kind, std::make_pair(sub, opts));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::string kind;
    CLI::App* sub = nullptr;
    std::shared_ptr<Opts> opts;
    for (auto& [k, pr] : subs)
      if (pr.first->parsed()) {
        kind = k;
        sub = pr.first;
        opts = pr.second;
      }

    mixer::cli::ExperimentConfig config;
    if (sub->count("--config"))
      config = mixer::cli::load_config_file(opts->config_path);
    if (!config.kind.empty() && config.kind != kind)
      throw mixer::ConfigError("config kind '" + config.kind +
                               "' does not match subcommand '" + kind + "'");
    config.kind = kind;

    if (sub->count("--seed")) config.seed = opts->seed;
    if (sub->count("--replicas")) config.replicas = opts->replicas;
    if (sub->count("--out")) config.out_dir = opts->out_dir;
    if (sub->count("--n")) config.n = opts->n;
    if (sub->count("--q")) config.q = opts->q;
    if (sub->count("--beta")) config.beta = opts->beta;
    if (sub->count("--gamma")) config.gamma = opts->gamma;
    if (sub->count("--lambda0"))
      apply_start_point(opts->lambda0, "--lambda0", config.lambda0,
                        config.lambda0_auto_cstar);
    if (sub->count("--m0"))
      apply_start_point(opts->m0, "--m0", config.m0, config.m0_auto_cstar);
    if (sub->count("--max-steps")) config.max_steps = opts->max_steps;
    if (sub->count("--threads")) config.threads = opts->threads;
    if (sub->count("--stride")) config.record_stride = opts->stride;
    if (sub->count("--trajectory-replicas"))
      config.trajectory_replicas = opts->trajectory_replicas;
    if (sub->count("--target-left")) config.target_left = opts->target_left;
    if (sub->count("--tol-prob")) config.tol_prob = opts->tol_prob;
    if (sub->count("--dt")) config.dt = opts->dt;
    if (sub->count("--sde-replicas")) config.sde_replicas = opts->sde_replicas;
    if (opts->assert_mode) config.assert_mode = true;

    const auto outcome = mixer::cli::run_experiment(config);
    std::printf("manifest: %s\n", outcome.manifest_path.c_str());
    if (outcome.exit_code == 3)
      std::fprintf(stderr, "assert: result checks failed\n");
    return outcome.exit_code;
  } catch (const mixer::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
