#include "mixer/phase_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "mixer/errors.hpp"
#include "mixer/roots.hpp"

namespace mixer {
namespace {

constexpr double kLambdaFloor = 1.0 + 1e-9;

void require_q_above_two(double q, const char* who) {
  if (!(q > 2.0)) throw DomainError(std::string(who) + ": requires q > 2");
}

// Fixed points of the scalar Potts drift exist only where the map
// x -> 1/(1 + (q-1) e^{beta(1-qx)/(q-1)}) crosses the diagonal; this
// evaluates D and its derivative without the struct wrapper.
double potts_drift_value(double x, double beta, double q) {
  const double e = std::exp(beta * (1.0 - q * x) / (q - 1.0));
  return 1.0 / (1.0 + (q - 1.0) * e) - x;
}

struct BetaUResult {
  double beta_u = 0.0;
  double x_touch = 0.0;  // argmax of D at beta_u (double root location)
};

// beta_u is where max_{x in (1/q,1)} D_beta(x) crosses zero; D is strictly
// increasing in beta pointwise, so the max is monotone and bisection is
// exact. Near beta_u the peak value degenerates quadratically in x (double
// root), so a value grid saturates at its own resolution; the analytic
// x-derivative keeps an O(1) slope there, and root-finding on it locates
// the peak to full precision.
BetaUResult solve_beta_u(double q, double beta_c) {
  const double x_lo = 1.0 / q + 1e-9 * (1.0 - 1.0 / q);
  auto max_of_drift = [&](double beta) -> std::pair<double, double> {
    auto dprime = [&](double x) {
      return potts_scalar_drift(x, beta, q).derivative;
    };
    // D' is negative at both edges and positive strictly between the
    // drift's local min and its peak; the peak is the right sign change.
    const int grid = 512;
    int pos = -1;
    for (int i = 1; i < grid && pos < 0; ++i) {
      const double x = x_lo + (1.0 - x_lo) * i / grid;
      if (dprime(x) > 0.0) pos = i;
    }
    if (pos < 0)  // D decreasing everywhere: the supremum sits at the edge.
      return {x_lo, potts_drift_value(x_lo, beta, q)};
    double hi = 1.0;
    for (int i = pos + 1; i <= grid; ++i) {
      const double x = x_lo + (1.0 - x_lo) * i / grid;
      if (!(dprime(x) > 0.0)) {
        hi = x;
        break;
      }
    }
    const double lo = x_lo + (1.0 - x_lo) * pos / grid;
    const double x_peak = bisect(dprime, lo, hi, 1e-13);
    return {x_peak, potts_drift_value(x_peak, beta, q)};
  };
  // As q -> 2+ the metastable window collapses: beta_c - beta_u = O((q-2)^3),
  // which underflows the bisection bracket in double precision. The drift
  // maximum at beta_c is then not positive numerically; report the window as
  // closed at beta_c rather than failing.
  const auto at_beta_c = max_of_drift(beta_c);
  if (!(at_beta_c.second > 0.0)) return {beta_c, at_beta_c.first};
  const double beta_u =
      bisect([&](double beta) { return max_of_drift(beta).second; }, 1e-6,
             beta_c, 1e-10);
  return {beta_u, max_of_drift(beta_u).first};
}

double r2_density_subcritical(double m_fraction, double lambda) {
  if (lambda >= 1.0)
    throw DomainError("r2 density: branching parameter must be subcritical");
  return m_fraction / (1.0 - lambda);
}

RcFixedPoints rc_fixed_points_checked(const ModelParams& params,
                                      const BetaThresholds& bt) {
  const double q = params.q;
  const double beta = params.beta;
  if (!(beta > bt.beta_u) || !(beta < bt.beta_s))
    throw NoRootError("rc_fixed_points: beta outside (beta_u, beta_s)");
  auto f = [&](double theta) { return cm_drift(theta, params); };
  // Smallest theta with a safely supercritical activated graph.
  const double lambda_min = 1.0 + 1e-7;
  const double theta_lo = (q * lambda_min / beta - 1.0) / (q - 1.0);
  if (!(theta_lo < 1.0) || f(theta_lo) >= 0.0)
    throw NoRootError("rc_fixed_points: beta too close to beta_s");
  const auto [x_max, f_max] = grid_golden_max(f, theta_lo, 1.0, 512, 1e-13);
  if (f_max <= 0.0)
    throw NoRootError("rc_fixed_points: drift has no supercritical roots");
  double r1 = bisect(f, theta_lo, x_max, 1e-13);
  double r2 = bisect(f, x_max, 1.0, 1e-13);
  if (cm_drift_derivative(r1, params) < 0.0 &&
      cm_drift_derivative(r2, params) > 0.0)
    std::swap(r1, r2);
  return {theta_lower_limit(beta, q), r1, r2};
}

PottsFixedPoints potts_fixed_points_checked(double beta, double q,
                                            const BetaThresholds& bt) {
  if (!(beta > bt.beta_u))
    throw NoRootError("potts_fixed_points: beta <= beta_u, drift has no "
                      "interior roots");
  auto d = [&](double x) { return potts_drift_value(x, beta, q); };
  const double x_lo = 1.0 / q + 1e-9 * (1.0 - 1.0 / q);
  const auto [x_max, d_max] = grid_golden_max(d, x_lo, 1.0, 512, 1e-13);
  if (d_max <= 0.0)
    throw NoRootError("potts_fixed_points: drift maximum not positive");
  PottsFixedPoints out;
  if (beta >= bt.beta_s || d(x_lo) > 0.0) {
    // Saddle merged into the uniform point: D > 0 on a right neighborhood
    // of 1/q, single interior stable root.
    out.m_star = 1.0 / q;
  } else {
    out.m_star = bisect(d, x_lo, x_max, 1e-13);
  }
  out.m_r = bisect(d, x_max, 1.0, 1e-13);
  if (out.m_star > out.m_r) std::swap(out.m_star, out.m_r);
  return out;
}

}  // namespace

double giant_fraction(double lambda) {
  if (!(lambda > kLambdaFloor))
    throw DomainError("giant_fraction: lambda must exceed 1 + 1e-9");
  // Root of h(x) = lambda*x + log(1-x); h > 0 at (lambda-1)/lambda^2 and
  // h < 0 at 1 - exp(-lambda)/2, both sides analytic for every lambda > 1.
  auto h = [lambda](double x) { return lambda * x + std::log1p(-x); };
  double lo = (lambda - 1.0) / (lambda * lambda);
  while (h(lo) <= 0.0 && lo > 1e-300) lo *= 0.5;
  double hi = 1.0 - 0.5 * std::exp(-lambda);
  return bisect(h, lo, hi, 1e-15);
}

double giant_fraction_derivative(double lambda) {
  const double a = giant_fraction(lambda);
  return a * (1.0 - a) / (1.0 - lambda * (1.0 - a));
}

double giant_variance_coeff(double lambda) {
  const double a = giant_fraction(lambda);
  const double d = 1.0 - lambda * (1.0 - a);
  return a * (1.0 - a) / (d * d);
}

ActivationFractions activation_fractions(double theta, double q) {
  if (!(theta >= 0.0) || !(theta <= 1.0))
    throw DomainError("activation_fractions: theta outside [0,1]");
  if (!(q > 1.0)) throw DomainError("activation_fractions: requires q > 1");
  return {theta + (1.0 - theta) / q, (1.0 - theta) / q};
}

double theta_lower_limit(double beta, double q) {
  if (!(beta > 0.0)) throw DomainError("theta_lower_limit: requires beta > 0");
  return (q - beta) / (beta * (q - 1.0));
}

double cm_drift(double theta, const ModelParams& params) {
  const auto k = activation_fractions(theta, params.q);
  const double lambda = params.beta * k.k_a;
  if (!(lambda > kLambdaFloor))
    throw DomainError("cm_drift: activated graph not supercritical "
                      "(theta at or below theta_s)");
  return giant_fraction(lambda) * k.k_a - theta;
}

double cm_drift_derivative(double theta, const ModelParams& params) {
  const auto k = activation_fractions(theta, params.q);
  const double lambda = params.beta * k.k_a;
  if (!(lambda > kLambdaFloor))
    throw DomainError("cm_drift_derivative: activated graph not "
                      "supercritical");
  const double dk = 1.0 - 1.0 / params.q;  // d k_a / d theta
  return (giant_fraction_derivative(lambda) * params.beta * k.k_a +
          giant_fraction(lambda)) *
             dk -
         1.0;
}

RcFixedPoints rc_fixed_points(const ModelParams& params) {
  require_q_above_two(params.q, "rc_fixed_points");
  return rc_fixed_points_checked(params, beta_thresholds(params.q));
}

BetaThresholds beta_thresholds(double q) {
  require_q_above_two(q, "beta_thresholds");
  BetaThresholds out;
  // log1p keeps beta_c finite and accurate as q -> 2+.
  out.beta_c = 2.0 * (q - 1.0) / (q - 2.0) * std::log1p(q - 2.0);
  out.beta_s = q;
  out.beta_u = solve_beta_u(q, out.beta_c).beta_u;
  return out;
}

double lambda_star(const ModelParams& params) {
  const auto fp = rc_fixed_points(params);
  auto g = [&](double lam) { return giant_fraction(lam) - fp.theta_star; };
  double hi = 2.0;
  while (g(hi) < 0.0 && hi < 1e3) hi *= 2.0;
  return bisect(g, 1.0 + 1e-7, hi, 1e-14);
}

double xi_weight(double q) {
  require_q_above_two(q, "xi_weight");
  const double beta_c = 2.0 * (q - 1.0) / (q - 2.0) * std::log1p(q - 2.0);
  const double ratio = (q - beta_c / (q - 1.0)) / (q - beta_c);
  const double arg = beta_c * beta_c * (q - 2.0) * (q * q - 4.0 * q + 2.0) /
                     (4.0 * q * (q - 1.0) * (q - 1.0));
  const double xi_prime =
      std::pow(ratio, (2.0 - q) / 2.0) * std::exp(arg) / (q - 1.0);
  return 1.0 / (1.0 + xi_prime);
}

ScalarDrift potts_scalar_drift(double x, double beta, double q) {
  if (!(x >= 0.0) || !(x <= 1.0))
    throw DomainError("potts_scalar_drift: x outside [0,1]");
  if (!(q > 1.0)) throw DomainError("potts_scalar_drift: requires q > 1");
  const double e = std::exp(beta * (1.0 - q * x) / (q - 1.0));
  const double den = 1.0 + (q - 1.0) * e;
  ScalarDrift out;
  out.value = 1.0 / den - x;
  out.derivative = q * beta * e / (den * den) - 1.0;
  return out;
}

PottsFixedPoints potts_fixed_points(double beta, double q) {
  require_q_above_two(q, "potts_fixed_points");
  return potts_fixed_points_checked(beta, q, beta_thresholds(q));
}

std::vector<double> vector_drift(const std::vector<double>& s, double beta,
                                 double q) {
  const auto qi = static_cast<std::size_t>(std::llround(q));
  if (std::abs(q - static_cast<double>(qi)) > 1e-9 || s.size() != qi)
    throw DomainError("vector_drift: q must equal the number of coordinates");
  double sum = 0.0;
  for (double v : s) {
    if (v < -1e-12) throw SimplexError("vector_drift: negative coordinate");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw SimplexError("vector_drift: coordinates do not sum to 1");
  double m = s[0];
  for (double v : s) m = std::max(m, v);
  std::vector<double> w(s.size());
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    w[i] = std::exp(beta * (s[i] - m));
    total += w[i];
  }
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = w[i] / total - s[i];
  return out;
}

double potts_potential(const std::vector<double>& s, double beta, double q) {
  if (!(beta > 0.0)) throw DomainError("potts_potential: requires beta > 0");
  const auto qi = static_cast<std::size_t>(std::llround(q));
  if (std::abs(q - static_cast<double>(qi)) > 1e-9 || s.size() != qi)
    throw DomainError("potts_potential: q must equal the number of "
                      "coordinates");
  double sum = 0.0;
  for (double v : s) {
    if (v < -1e-12) throw SimplexError("potts_potential: negative coordinate");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw SimplexError("potts_potential: coordinates do not sum to 1");
  double m = s[0];
  for (double v : s) m = std::max(m, v);
  double lse = 0.0;
  double norm2 = 0.0;
  for (double v : s) {
    lse += std::exp(beta * (v - m));
    norm2 += v * v;
  }
  return -(m + std::log(lse) / beta) + 0.5 * norm2;
}

NoiseScales noise_scales(double lambda, double beta_c_val) {
  if (!(beta_c_val > 0.0)) throw DomainError("noise_scales: beta_c must be positive");
  NoiseScales out;
  out.h1 = giant_fraction(lambda) +
           giant_fraction_derivative(lambda) * lambda / beta_c_val;
  out.h2 = giant_variance_coeff(lambda) * lambda / beta_c_val;
  return out;
}

std::vector<double> surrogate_variance_sequence(std::size_t T, double q,
                                                double beta_c_val,
                                                double lambda0) {
  if (!(lambda0 > 1.0))
    throw DomainError("surrogate_variance_sequence: lambda0 must exceed 1");
  const double alpha0 = giant_fraction(lambda0);
  // Non-giant remainder of G(n, lambda0/n): subcritical with branching
  // parameter lambda0 * (1 - alpha0).
  const double r0 =
      r2_density_subcritical(1.0 - alpha0, lambda0 * (1.0 - alpha0));
  const ModelParams params{q, beta_c_val, 0};
  const auto fp = rc_fixed_points(params);
  const double k_ia = activation_fractions(fp.theta_star, q).k_ia;
  const double r_star = r2_density_subcritical(k_ia, beta_c_val * k_ia);
  const double a = 1.0 - 1.0 / q;
  std::vector<double> v(T + 1);
  v[0] = (1.0 / q) * a * r0;
  for (std::size_t s = 0; s < T; ++s)
    v[s + 1] = a * v[s] + (1.0 / q) * a * r_star;
  return v;
}

RcThresholds rc_thresholds(double q, double beta) {
  require_q_above_two(q, "rc_thresholds");
  const auto bt = beta_thresholds(q);
  const ModelParams params{q, beta, 0};
  const auto fp = rc_fixed_points_checked(params, bt);
  RcThresholds out;
  out.beta_u = bt.beta_u;
  out.beta_c = bt.beta_c;
  out.beta_s = bt.beta_s;
  out.theta_s = fp.theta_s;
  out.theta_star = fp.theta_star;
  out.theta_r = fp.theta_r;
  {
    auto g = [&](double lam) {
      return giant_fraction(lam) - fp.theta_star;
    };
    double hi = 2.0;
    while (g(hi) < 0.0 && hi < 1e3) hi *= 2.0;
    out.lambda_star = bisect(g, 1.0 + 1e-7, hi, 1e-14);
  }
  out.xi = xi_weight(q);
  return out;
}

PottsThresholds potts_thresholds_at(double q, double beta) {
  require_q_above_two(q, "potts_thresholds_at");
  const auto bt = beta_thresholds(q);
  const auto fp = potts_fixed_points_checked(beta, q, bt);
  return {bt.beta_u, bt.beta_c, bt.beta_s, fp.m_star, fp.m_r};
}

SurrogateParams make_surrogate_params(double q, double c_offset) {
  require_q_above_two(q, "make_surrogate_params");
  const auto bt = beta_thresholds(q);
  const auto thr = rc_thresholds(q, bt.beta_c);
  const ModelParams params{q, bt.beta_c, 0};
  SurrogateParams out;
  out.drift_slope = cm_drift_derivative(thr.theta_star, params);
  out.activation_prob = 1.0 / q;
  const double d_star =
      bt.beta_c * activation_fractions(thr.theta_star, q).k_a;
  const auto ns = noise_scales(d_star, bt.beta_c);
  out.h1_val = ns.h1;
  out.h2_val = ns.h2;
  out.noise_variances =
      surrogate_variance_sequence(64, q, bt.beta_c, thr.lambda_star);
  const double k_ia = activation_fractions(thr.theta_star, q).k_ia;
  out.v_inf = (1.0 - 1.0 / q) *
              r2_density_subcritical(k_ia, bt.beta_c * k_ia);
  out.init_mean = c_offset * giant_fraction_derivative(thr.lambda_star);
  out.init_variance = giant_variance_coeff(thr.lambda_star);
  return out;
}

}  // namespace mixer
