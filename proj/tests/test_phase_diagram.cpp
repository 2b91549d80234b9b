#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixer/errors.hpp"
#include "mixer/phase_diagram.hpp"

using namespace mixer;

// Frozen reference values, computed independently with 40-digit arithmetic
// directly from the defining equations (root solves on exp(-lam x) = 1-x,
// the tangency system D = D' = 0, and the closed forms at q = 3 and q = 4
// where the critical fixed points are exact rationals).
namespace {
constexpr double kBetaC3 = 2.7725887222397812;      // 4 ln 2
constexpr double kBetaU3 = 2.7456435767327244;
constexpr double kBetaC4 = 3.2958368660043291;      // 3 ln 3
constexpr double kBetaU4 = 3.2187410883369562;
constexpr double kAlpha2 = 0.79681213002002005;
constexpr double kAlphaPrime2 = 0.27273575285157374;
constexpr double kSigma2At2 = 0.45944172300703756;
constexpr double kLambdaStar3 = 1.1507282898071237;  // 4 ln(4/3)
constexpr double kAlphaPrimeStar3 = 1.3690750001881359;
constexpr double kSigma2Star3 = 9.9966205660807693;
constexpr double kDriftSlope3 = 0.086297117756976485;
constexpr double kThetaS3 = 0.041010640333361278;
constexpr double kH1 = 0.90736141915886618;
constexpr double kH2 = 1.3275466065530037;
constexpr double kV0 = 1.2169555557227874;
constexpr double kV1 = 0.99235322344135438;
constexpr double kVInf = 0.54314855887848824;
constexpr double kXi3 = 0.86212613277850894;
constexpr double kXi4 = 0.90139391779720536;
constexpr double kDPrimeMStar3 = 0.039720770839917964;
constexpr double kDPrimeMr3 = -0.075803759253406254;
constexpr double kMr3Beta3 = 0.81091684442379168;
constexpr double kMr3Beta35 = 0.91290114074670302;
constexpr double kThetaS4 = 0.071217434056372175;
}  // namespace

TEST_CASE("giant fraction solves its fixed-point equation") {
  CHECK(std::abs(giant_fraction(2.0 * std::log(2.0)) - 0.5) < 1e-13);
  CHECK(std::abs(giant_fraction(2.0) - kAlpha2) < 1e-12);
  for (double lam : {1.2, 2.0, 5.0, 30.0}) {
    const double a = giant_fraction(lam);
    CHECK(std::abs(std::exp(-lam * a) - (1.0 - a)) < 1e-13);
  }
  CHECK_THROWS_AS(giant_fraction(1.0), DomainError);
  CHECK_THROWS_AS(giant_fraction(1.0 + 1e-10), DomainError);
  CHECK_THROWS_AS(giant_fraction(0.5), DomainError);
}

TEST_CASE("giant fraction derivative and variance coefficient") {
  CHECK(std::abs(giant_fraction_derivative(2.0 * std::log(2.0)) -
                 1.0 / (4.0 * (1.0 - std::log(2.0)))) < 1e-11);
  CHECK(std::abs(giant_fraction_derivative(2.0) - kAlphaPrime2) < 1e-10);
  // Finite differences agree with the implicit-function formula.
  const double h = 1e-6;
  const double fd =
      (giant_fraction(1.5 + h) - giant_fraction(1.5 - h)) / (2.0 * h);
  CHECK(std::abs(fd - giant_fraction_derivative(1.5)) < 1e-5);
  CHECK(std::abs(giant_variance_coeff(2.0) - kSigma2At2) < 1e-10);
  CHECK(std::abs(giant_variance_coeff(kLambdaStar3) - kSigma2Star3) < 1e-8);
}

TEST_CASE("activation fractions satisfy the mass identity") {
  for (double theta : {0.0, 0.25, 0.7, 1.0}) {
    const auto k = activation_fractions(theta, 3.0);
    CHECK(std::abs(k.k_a - (theta + (1.0 - theta) / 3.0)) < 1e-15);
    CHECK(std::abs(k.k_a + 2.0 * k.k_ia - 1.0) < 1e-15);
  }
  const auto k0 = activation_fractions(0.0, 4.0);
  CHECK(k0.k_a == k0.k_ia);
  CHECK_THROWS_AS(activation_fractions(-0.1, 3.0), DomainError);
  CHECK_THROWS_AS(activation_fractions(1.1, 3.0), DomainError);
}

TEST_CASE("theta lower limit marks criticality of the activated graph") {
  const double ts = theta_lower_limit(kBetaC3, 3.0);
  CHECK(std::abs(ts - kThetaS3) < 1e-12);
  // beta * k_a(theta_s) = 1 by definition.
  const auto k = activation_fractions(ts, 3.0);
  CHECK(std::abs(kBetaC3 * k.k_a - 1.0) < 1e-12);
  CHECK(std::abs(theta_lower_limit(3.0, 3.0)) < 1e-15);
  CHECK_THROWS_AS(theta_lower_limit(0.0, 3.0), DomainError);
}

TEST_CASE("cm drift vanishes at the exact critical fixed points") {
  const ModelParams p3{3.0, kBetaC3, 0};
  CHECK(std::abs(cm_drift(0.25, p3)) < 1e-12);
  CHECK(std::abs(cm_drift(0.5, p3)) < 1e-12);
  // Sign structure: negative below the saddle, positive between saddle
  // and the stable root, negative above.
  CHECK(cm_drift(0.15, p3) < 0.0);
  CHECK(cm_drift(0.35, p3) > 0.0);
  CHECK(cm_drift(0.6, p3) < 0.0);
  CHECK_THROWS_AS(cm_drift(0.01, p3), DomainError);
}

TEST_CASE("cm drift derivative at the saddle and stable root") {
  const ModelParams p3{3.0, kBetaC3, 0};
  CHECK(std::abs(cm_drift_derivative(0.25, p3) - kDriftSlope3) < 1e-10);
  CHECK(cm_drift_derivative(0.5, p3) < 0.0);
  const double h = 1e-6;
  const double fd = (cm_drift(0.4 + h, p3) - cm_drift(0.4 - h, p3)) / (2 * h);
  CHECK(std::abs(fd - cm_drift_derivative(0.4, p3)) < 1e-5);
}

TEST_CASE("beta thresholds at q = 3 and q = 4") {
  const auto b3 = beta_thresholds(3.0);
  CHECK(std::abs(b3.beta_c - kBetaC3) < 1e-13);
  CHECK(b3.beta_s == 3.0);
  CHECK(std::abs(b3.beta_u - kBetaU3) < 5e-8);
  CHECK(b3.beta_u < b3.beta_c);
  CHECK(b3.beta_c < b3.beta_s);
  const auto b4 = beta_thresholds(4.0);
  CHECK(std::abs(b4.beta_c - kBetaC4) < 1e-13);
  CHECK(b4.beta_s == 4.0);
  CHECK(std::abs(b4.beta_u - kBetaU4) < 5e-8);
}

TEST_CASE("beta thresholds stay finite and ordered as q approaches 2") {
  const auto bt = beta_thresholds(2.0 + 1e-9);
  CHECK(std::abs(bt.beta_c - 2.0) < 1e-8);
  CHECK(bt.beta_u <= bt.beta_c);
  CHECK(bt.beta_u > 1.9);
  CHECK_THROWS_AS(beta_thresholds(2.0), DomainError);
  CHECK_THROWS_AS(beta_thresholds(1.5), DomainError);
}

TEST_CASE("rc fixed points are exact rationals at criticality") {
  const auto fp3 = rc_fixed_points({3.0, kBetaC3, 0});
  CHECK(std::abs(fp3.theta_star - 0.25) < 1e-10);
  CHECK(std::abs(fp3.theta_r - 0.5) < 1e-10);
  CHECK(std::abs(fp3.theta_s - kThetaS3) < 1e-12);
  const auto fp4 = rc_fixed_points({4.0, kBetaC4, 0});
  CHECK(std::abs(fp4.theta_star - 1.0 / 3.0) < 1e-10);
  CHECK(std::abs(fp4.theta_r - 2.0 / 3.0) < 1e-10);
  CHECK(std::abs(fp4.theta_s - kThetaS4) < 1e-12);
}

TEST_CASE("rc fixed points require beta inside the metastable window") {
  CHECK_THROWS_AS(rc_fixed_points({3.0, 2.70, 0}), NoRootError);
  CHECK_THROWS_AS(rc_fixed_points({3.0, 3.0, 0}), NoRootError);
  CHECK_THROWS_AS(rc_fixed_points({3.0, 3.4, 0}), NoRootError);
  // Just above beta_u both roots exist and straddle the drift maximum.
  const ModelParams p{3.0, 2.746, 0};
  const auto fp = rc_fixed_points(p);
  CHECK(fp.theta_star < fp.theta_r);
  CHECK(std::abs(cm_drift(fp.theta_star, p)) < 1e-10);
  CHECK(std::abs(cm_drift(fp.theta_r, p)) < 1e-10);
  CHECK(cm_drift_derivative(fp.theta_star, p) > 0.0);
  CHECK(cm_drift_derivative(fp.theta_r, p) < 0.0);
}

TEST_CASE("rc thresholds bundle matches the frozen constants") {
  const auto t = rc_thresholds(3.0, kBetaC3);
  CHECK(std::abs(t.lambda_star - kLambdaStar3) < 1e-10);
  CHECK(std::abs(t.lambda_star - 4.0 * std::log(4.0 / 3.0)) < 1e-10);
  CHECK(std::abs(t.xi - kXi3) < 1e-12);
  CHECK(std::abs(giant_fraction(t.lambda_star) - t.theta_star) < 1e-10);
  CHECK(std::abs(xi_weight(4.0) - kXi4) < 1e-12);
}

TEST_CASE("potts scalar drift vanishes at the critical fixed points") {
  CHECK(std::abs(potts_scalar_drift(0.5, kBetaC3, 3.0).value) < 1e-13);
  CHECK(std::abs(potts_scalar_drift(2.0 / 3.0, kBetaC3, 3.0).value) < 1e-13);
  CHECK(std::abs(potts_scalar_drift(0.5, kBetaC3, 3.0).derivative -
                 kDPrimeMStar3) < 1e-11);
  CHECK(std::abs(potts_scalar_drift(2.0 / 3.0, kBetaC3, 3.0).derivative -
                 kDPrimeMr3) < 1e-11);
  const double h = 1e-6;
  const double fd = (potts_scalar_drift(0.45 + h, 2.9, 3.0).value -
                     potts_scalar_drift(0.45 - h, 2.9, 3.0).value) /
                    (2 * h);
  CHECK(std::abs(fd - potts_scalar_drift(0.45, 2.9, 3.0).derivative) < 1e-5);
  CHECK_THROWS_AS(potts_scalar_drift(-0.1, 2.9, 3.0), DomainError);
  CHECK_THROWS_AS(potts_scalar_drift(1.1, 2.9, 3.0), DomainError);
}

TEST_CASE("potts fixed points across the window") {
  const auto c3 = potts_fixed_points(kBetaC3, 3.0);
  CHECK(std::abs(c3.m_star - 0.5) < 1e-10);
  CHECK(std::abs(c3.m_r - 2.0 / 3.0) < 1e-10);
  const auto c4 = potts_fixed_points(kBetaC4, 4.0);
  CHECK(std::abs(c4.m_star - 0.5) < 1e-10);
  CHECK(std::abs(c4.m_r - 0.75) < 1e-10);
  // At and above beta_s the saddle merges into the uniform point.
  const auto s3 = potts_fixed_points(3.0, 3.0);
  CHECK(std::abs(s3.m_star - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(s3.m_r - kMr3Beta3) < 1e-10);
  const auto s35 = potts_fixed_points(3.5, 3.0);
  CHECK(std::abs(s35.m_star - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(s35.m_r - kMr3Beta35) < 1e-10);
  // Interior saddle strictly between 1/q and m_r inside the window.
  const auto w = potts_fixed_points(2.76, 3.0);
  CHECK(w.m_star > 1.0 / 3.0);
  CHECK(w.m_star < w.m_r);
  CHECK(potts_scalar_drift(w.m_star, 2.76, 3.0).derivative > 0.0);
  CHECK_THROWS_AS(potts_fixed_points(2.70, 3.0), NoRootError);
}

TEST_CASE("vector drift vanishes at uniform and at the ordered point") {
  const std::vector<double> uniform = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (double v : vector_drift(uniform, 2.9, 3.0)) CHECK(std::abs(v) < 1e-14);
  // At beta_c = 4 ln 2 the weights at (2/3, 1/6, 1/6) are (1, 1/4, 1/4).
  const std::vector<double> ordered = {2.0 / 3, 1.0 / 6, 1.0 / 6};
  for (double v : vector_drift(ordered, kBetaC3, 3.0))
    CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("vector drift reduces to the scalar drift on symmetric states") {
  for (double x : {0.4, 0.55, 0.8}) {
    const std::vector<double> s = {x, (1.0 - x) / 2.0, (1.0 - x) / 2.0};
    const auto d = vector_drift(s, 2.9, 3.0);
    CHECK(std::abs(d[0] - potts_scalar_drift(x, 2.9, 3.0).value) < 1e-13);
    CHECK(std::abs(d[1] - d[2]) < 1e-15);
  }
}

TEST_CASE("vector drift validates the simplex") {
  CHECK_THROWS_AS(vector_drift({0.5, 0.6, 0.1}, 2.9, 3.0), SimplexError);
  CHECK_THROWS_AS(vector_drift({0.7, 0.5, -0.2}, 2.9, 3.0), SimplexError);
  CHECK_THROWS_AS(vector_drift({0.5, 0.5}, 2.9, 3.0), DomainError);
  CHECK_THROWS_AS(vector_drift({0.4, 0.3, 0.3}, 2.9, 3.3), DomainError);
}

TEST_CASE("potential is equal at both phases exactly at beta_c") {
  const std::vector<double> uniform = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const std::vector<double> ordered = {2.0 / 3, 1.0 / 6, 1.0 / 6};
  const double vu = potts_potential(uniform, kBetaC3, 3.0);
  const double vo = potts_potential(ordered, kBetaC3, 3.0);
  CHECK(std::abs(vu - vo) < 1e-13);
  // Off criticality the degeneracy breaks in the expected direction.
  CHECK(potts_potential(uniform, 2.9, 3.0) >
        potts_potential({kMr3Beta3, (1 - kMr3Beta3) / 2, (1 - kMr3Beta3) / 2},
                        2.9, 3.0) -
            1e-12);
  // The potential decreases along the drift away from fixed points.
  const std::vector<double> s = {0.55, 0.25, 0.2};
  const auto d = vector_drift(s, 2.9, 3.0);
  std::vector<double> moved = s;
  for (std::size_t i = 0; i < s.size(); ++i) moved[i] += 1e-4 * d[i];
  CHECK(potts_potential(moved, 2.9, 3.0) < potts_potential(s, 2.9, 3.0));
}

TEST_CASE("noise scales at the critical activated degree") {
  const auto ns = noise_scales(2.0 * std::log(2.0), kBetaC3);
  CHECK(std::abs(ns.h1 - kH1) < 1e-11);
  CHECK(std::abs(ns.h2 - kH2) < 1e-11);
  CHECK_THROWS_AS(noise_scales(2.0, 0.0), DomainError);
}

TEST_CASE("surrogate variance sequence follows the geometric recursion") {
  const auto v = surrogate_variance_sequence(64, 3.0, kBetaC3, kLambdaStar3);
  REQUIRE(v.size() == 65);
  CHECK(std::abs(v[0] - kV0) < 1e-10);
  CHECK(std::abs(v[1] - kV1) < 1e-10);
  for (std::size_t s = 0; s + 1 < v.size(); ++s) CHECK(v[s + 1] < v[s]);
  CHECK(std::abs(v[64] - kVInf) < 1e-10);
  // Exact geometric contraction at rate 1 - 1/q toward the limit.
  CHECK(std::abs((v[5] - kVInf) - (2.0 / 3.0) * (v[4] - kVInf)) < 1e-12);
  CHECK_THROWS_AS(surrogate_variance_sequence(8, 3.0, kBetaC3, 0.9),
                  DomainError);
}

TEST_CASE("surrogate parameter bundle is consistent") {
  const auto sp = make_surrogate_params(3.0, 1.0);
  CHECK(std::abs(sp.drift_slope - kDriftSlope3) < 1e-10);
  CHECK(std::abs(sp.activation_prob - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(sp.h1_val - kH1) < 1e-10);
  CHECK(std::abs(sp.h2_val - kH2) < 1e-10);
  CHECK(std::abs(sp.v_inf - kVInf) < 1e-10);
  CHECK(std::abs(sp.init_mean - kAlphaPrimeStar3) < 1e-8);
  CHECK(std::abs(sp.init_variance - kSigma2Star3) < 1e-8);
  REQUIRE(sp.noise_variances.size() == 65);
  const auto sp2 = make_surrogate_params(3.0, 2.5);
  CHECK(std::abs(sp2.init_mean - 2.5 * kAlphaPrimeStar3) < 1e-8);
  CHECK(std::abs(sp2.init_variance - sp.init_variance) < 1e-15);
}

TEST_CASE("threshold bundles propagate the window error") {
  CHECK_THROWS_AS(rc_thresholds(3.0, 2.5), NoRootError);
  CHECK_THROWS_AS(potts_thresholds_at(3.0, 2.5), NoRootError);
  const auto pt = potts_thresholds_at(3.0, kBetaC3);
  CHECK(std::abs(pt.beta_c - kBetaC3) < 1e-13);
  CHECK(std::abs(pt.m_star - 0.5) < 1e-10);
  CHECK(std::abs(pt.m_r - 2.0 / 3.0) < 1e-10);
}
