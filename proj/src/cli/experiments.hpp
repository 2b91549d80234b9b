#pragma once

#include <cstdint>
#include <string>

#include "config.hpp"
#include "mixer/rng.hpp"

namespace mixer::cli {

// Replica r of master seed s draws from stream seed_stream(s, r); the
// mapping is injective in r, so ensembles are reproducible and
// schedule-independent.
inline std::uint64_t seed_stream(std::uint64_t master_seed,
                                 std::uint64_t replica_index) {
  return derive_stream_seed(master_seed, replica_index);
}

struct ExperimentOutcome {
  int exit_code = 0;  // 0 ok, 3 when --assert checks fail
  std::string manifest_path;
};

// Runs one experiment: writes manifest.json, results.csv and per-replica
// trajectory CSVs under config.out_dir. Throws ConfigError for bad
// configs; assert failures return exit_code 3 instead of throwing.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

}  // namespace mixer::cli
