#pragma once

#include <cstdint>
#include <vector>

namespace mixer {

struct ModelParams {
  double q = 3.0;
  double beta = 0.0;
  std::uint64_t n = 0;
};

// Critical window of the mean-field random-cluster drift for one (q, beta).
struct RcThresholds {
  double beta_u = 0.0;      // spinodal where the metastable branch appears
  double beta_c = 0.0;      // first-order transition point
  double beta_s = 0.0;      // = q; saddle merges into the disordered branch
  double theta_s = 0.0;     // activated giant is critical: beta*k_a = 1
  double theta_star = 0.0;  // unstable fixed point of the drift (saddle)
  double theta_r = 0.0;     // stable ordered fixed point
  double lambda_star = 0.0; // alpha(lambda_star) = theta_star
  double xi = 0.0;          // disordered weight of the critical mixture
};

struct PottsThresholds {
  double beta_u = 0.0;
  double beta_c = 0.0;
  double beta_s = 0.0;
  double m_star = 0.0;  // unstable root of the scalar drift (saddle)
  double m_r = 0.0;     // stable ordered root
};

// Normalized parameters of the 1-D Gaussian surrogate chain. Everything is
// in units of the rescaled giant deviation z = (L1 - theta_star*n)/sqrt(n),
// so construction is n-free.
struct SurrogateParams {
  double drift_slope = 0.0;       // f'(theta_star) > 0
  double activation_prob = 0.0;   // 1/q
  double h1_val = 0.0;            // giant-response noise scale
  double h2_val = 0.0;            // percolation noise scale
  std::vector<double> noise_variances;  // v_0..v_H, normalized sigma_t^2/n
  double v_inf = 0.0;             // limit of the variance recursion
  double init_mean = 0.0;         // c * alpha'(lambda_star)
  double init_variance = 0.0;     // sigma^2(lambda_star)
};

// Fraction alpha(lambda) occupied by the giant component of a supercritical
// mean-degree-lambda random graph: largest root of exp(-lambda*x) = 1 - x.
// Requires lambda > 1 + 1e-9; residual below 1e-12.
double giant_fraction(double lambda);

// d(alpha)/d(lambda) = alpha(1-alpha) / (1 - lambda(1-alpha)).
double giant_fraction_derivative(double lambda);

// Variance coefficient of the giant size: Var(L1) ~ sigma^2(lambda) * n with
// sigma^2 = alpha(1-alpha) / (1 - lambda(1-alpha))^2.
double giant_variance_coeff(double lambda);

struct ActivationFractions {
  double k_a = 0.0;   // fraction of vertices active when the giant activates
  double k_ia = 0.0;  // fraction active when it does not
};

// k_a(theta) = theta + (1-theta)/q, k_ia(theta) = (1-theta)/q.
ActivationFractions activation_fractions(double theta, double q);

// theta_s(beta, q) = (q - beta) / (beta (q-1)): the activated fraction is
// exactly critical, beta * k_a(theta_s) = 1.
double theta_lower_limit(double beta, double q);

// One-step drift of the rescaled giant: f(theta) =
// alpha(beta*k_a(theta)) * k_a(theta) - theta. Defined for theta above
// theta_s (DomainError otherwise, the activated graph is not supercritical).
double cm_drift(double theta, const ModelParams& params);

// f'(theta), via the closed form of alpha'.
double cm_drift_derivative(double theta, const ModelParams& params);

struct RcFixedPoints {
  double theta_s = 0.0;
  double theta_star = 0.0;
  double theta_r = 0.0;
};

// Both roots of f in (theta_s, 1]: theta_star has f' > 0, theta_r has
// f' < 0. NoRootError outside beta in (beta_u, beta_s).
RcFixedPoints rc_fixed_points(const ModelParams& params);

struct BetaThresholds {
  double beta_u = 0.0;
  double beta_c = 0.0;
  double beta_s = 0.0;
};

// beta_u: the scalar Potts drift D_beta first touches 0 on (1/q, 1);
// beta_c = 2 (q-1)/(q-2) * log(q-1); beta_s = q. Requires q > 2.
BetaThresholds beta_thresholds(double q);

// lambda with alpha(lambda) = theta_star(beta, q).
double lambda_star(const ModelParams& params);

// Disordered weight of the critical equilibrium mixture:
// xi = 1/(1+xi') with
// xi' = (1/(q-1)) * ((q - beta_c/(q-1)) / (q - beta_c))^((2-q)/2)
//       * exp(beta_c^2 (q-2)(q^2-4q+2) / (4 q (q-1)^2)).
double xi_weight(double q);

struct ScalarDrift {
  double value = 0.0;
  double derivative = 0.0;
};

// Scalar Potts drift for the dominant proportion x in [1/q, 1]:
// D(x) = 1/(1 + (q-1) e^{beta (1-qx)/(q-1)}) - x, and its x-derivative.
ScalarDrift potts_scalar_drift(double x, double beta, double q);

struct PottsFixedPoints {
  double m_star = 0.0;
  double m_r = 0.0;
};

// Roots of the scalar drift: the saddle m_star (D' > 0; equals 1/q once
// beta >= beta_s) and the stable ordered root m_r (D' < 0). NoRootError for
// beta <= beta_u.
PottsFixedPoints potts_fixed_points(double beta, double q);

// Coordinate-wise drift g_beta(s) - s of the proportions vector, where
// g_beta,k = exp(beta s_k) / sum_j exp(beta s_j). SimplexError if s is not
// a probability vector within 1e-9. Components sum to 0 within 1e-12.
std::vector<double> vector_drift(const std::vector<double>& s, double beta,
                                 double q);

// Free-energy functional F(s) = -(1/beta) log sum_k exp(beta s_k)
// + 0.5 ||s||^2; the drift is its negative simplex-tangential gradient.
double potts_potential(const std::vector<double>& s, double beta, double q);

struct NoiseScales {
  double h1 = 0.0;
  double h2 = 0.0;
};

// h1 = alpha(lambda) + alpha'(lambda) * lambda / beta_c,
// h2 = sigma^2(lambda) * lambda / beta_c.
NoiseScales noise_scales(double lambda, double beta_c_val);

// Normalized variance proxies v_0..v_T for the surrogate noise:
// v_0 = (1/q)(1-1/q) r_0(lambda0), then
// v_{s+1} = (1-1/q) v_s + (1/q)(1-1/q) r_*,
// with r_0 the non-giant pair density of G(n, lambda0/n) and r_* the pair
// density of the inactive refresh graph. DomainError if lambda0 <= 1.
std::vector<double> surrogate_variance_sequence(std::size_t T, double q,
                                                double beta_c_val,
                                                double lambda0);

// Bundles every threshold for one (q, beta). The theta/lambda fields need
// beta in (beta_u, beta_s), otherwise NoRootError.
RcThresholds rc_thresholds(double q, double beta);

PottsThresholds potts_thresholds_at(double q, double beta);

// Surrogate parameters at criticality (beta = beta_c(q)) with the initial
// mean offset c (the chain starts at z ~ Normal(c*alpha'(lambda_star),
// sigma^2(lambda_star))). Horizon of precomputed variances: 64 entries,
// callers clamp to v_inf beyond it.
SurrogateParams make_surrogate_params(double q, double c_offset);

}  // namespace mixer
