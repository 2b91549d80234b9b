#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mixer {

// One SplitMix64 step: advances the state and returns a mixed output.
// Used only for seed derivation, not for simulation draws.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Engine seed for stream `stream` of a master seed. Bijective in `stream`
// for fixed master (odd multiplier, xor, SplitMix64 finalizer), so every
// replica gets a distinct seed and results do not depend on which thread
// runs which replica.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t stream) {
  std::uint64_t s = master_seed;
  const std::uint64_t mixed_master = splitmix64(s);
  s = mixed_master ^ (stream * 0xd1342543de82ef95ULL);
  return splitmix64(s);
}

// Seedable, stream-splittable RNG. All conversions from raw 64-bit output
// to doubles/integers are implemented here (not via std distributions) so
// sequences are identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t master_seed, std::uint64_t stream)
      : eng_(derive_stream_seed(master_seed, stream)) {}

  std::uint64_t u64() { return eng_(); }

  // Uniform on [0,1) with 53 random bits.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform on {0,...,n-1}, unbiased via rejection of the short cycle.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t rej = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x;
    do {
      x = eng_();
    } while (x < rej);
    return x % n;
  }

  bool bernoulli(double p) { return unit() < p; }

  // Standard normal via Marsaglia polar; second value cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * unit() - 1.0;
      v = 2.0 * unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mixer
