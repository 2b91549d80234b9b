#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mixer/errors.hpp"

namespace mixer {

// Streaming mean/variance (Welford).
class Welford {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  // Unbiased sample variance.
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Kolmogorov-Smirnov statistic sup_x |F_emp(x) - F(x)|. Sorts a copy.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

// 99th percentile of the chi-squared distribution, small dof only (enough
// for uniformity tests over q <= 10 colors).
inline double chi2_quantile_99(int dof) {
  static const double kTable[] = {6.6349, 9.2103, 11.3449, 13.2767, 15.0863,
                                  16.8119, 18.4753, 20.0902, 21.6660};
  if (dof < 1 || dof > 9) throw DomainError("chi2_quantile_99: dof outside 1..9");
  return kTable[dof - 1];
}

// Chi-squared statistic for observed counts against a uniform expectation.
inline double chi2_uniform_stat(const std::vector<std::uint64_t>& observed) {
  std::uint64_t total = 0;
  for (auto c : observed) total += c;
  const double expected =
      static_cast<double>(total) / static_cast<double>(observed.size());
  double stat = 0.0;
  for (auto c : observed) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

inline double binomial_se(double p, std::uint64_t n) {
  return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

}  // namespace mixer
