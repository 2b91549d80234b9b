#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixer/rng.hpp"

#ifdef MIXER_HAVE_OPENMP
#include <omp.h>
#endif

namespace mixer {

// Runs work(replica_index, rng) for each replica with a stream derived from
// (master_seed, replica_index). Results are written into fixed slots, so the
// output is identical for any thread count, including the serial reference.
template <class Result, class Work>
std::vector<Result> run_replicas_serial(std::uint64_t replicas,
                                        std::uint64_t master_seed,
                                        Work&& work) {
  std::vector<Result> out(replicas);
  for (std::uint64_t r = 0; r < replicas; ++r) {
    Rng rng(master_seed, r);
    out[r] = work(r, rng);
  }
  return out;
}

template <class Result, class Work>
std::vector<Result> run_replicas(std::uint64_t replicas,
                                 std::uint64_t master_seed, Work&& work,
                                 int threads = 0) {
#ifdef MIXER_HAVE_OPENMP
  std::vector<Result> out(replicas);
  std::string error;
  const auto n = static_cast<std::int64_t>(replicas);
#pragma omp parallel for schedule(dynamic) num_threads( \
    threads > 0 ? threads : omp_get_max_threads())
  for (std::int64_t r = 0; r < n; ++r) {
    try {
      Rng rng(master_seed, static_cast<std::uint64_t>(r));
      out[static_cast<std::uint64_t>(r)] =
          work(static_cast<std::uint64_t>(r), rng);
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error("replica failed: " + error);
  return out;
#else
  (void)threads;
  return run_replicas_serial<Result>(replicas, master_seed,
                                     std::forward<Work>(work));
#endif
}

}  // namespace mixer
