#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "softshock/effective.hpp"
#include "softshock/kernels.hpp"

using namespace softshock;
using boost::math::airy_ai;

namespace {

template <typename F>
double integrate(F f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 25, 1e-14);
}

QuadConfig fine() {
  QuadConfig c;
  c.aux_panel = 0.5;
  c.aux_order = 24;
  return c;
}

}  // namespace

TEST(SKernel, ZeroParameterIsPlainAiry) {
  for (double u : {-1.0, 0.0, 2.0})
    for (double v : {-0.5, 1.0}) EXPECT_NEAR(s_kernel(0.0, u, v), airy_ai(v - u), 1e-14);
}

TEST(SKernel, PrefactorAssembledInLogSpace) {
  EXPECT_NEAR(s_kernel(1.0, 0.0, 0.0), std::exp(2.0 / 3.0) * airy_ai(1.0), 1e-14);
  EXPECT_NEAR(s_kernel(-2.0, 0.0, 0.0) / (std::exp(-16.0 / 3.0) * airy_ai(4.0)), 1.0, 1e-11);
  // e^{(2/3) 1000} would overflow; the product does not.
  EXPECT_TRUE(std::isfinite(s_kernel(-10.0, 0.0, 0.0)));
}

TEST(GoeKernel, ValuesAndSymmetry) {
  EXPECT_NEAR(goe_kernel(0.0, 0.0), std::cbrt(0.5) * airy_ai(0.0), 1e-15);
  EXPECT_EQ(goe_kernel(1.0, 2.0), goe_kernel(2.0, 1.0));
  EXPECT_GE(goe_kernel(10.0, 10.0), 0.0);
  EXPECT_LT(goe_kernel(10.0, 10.0), 1e-10);
}

TEST(EKernel, NegativeBetaRejected) {
  EXPECT_THROW(e_beta_kernel(-0.1, 0.0, 0.0), std::domain_error);
}

TEST(EKernel, BetaZeroAgainstIndependentQuadrature) {
  const double ref = integrate([](double z) { return airy_ai(z) * airy_ai(z); }, 0.0, 40.0) -
                     integrate([](double z) { return airy_ai(z) * airy_ai(-z); }, 0.0, 40.0);
  EXPECT_NEAR(e_beta_kernel(0.0, 0.0, 0.0), ref, 1e-8);
  EXPECT_NEAR(e_beta_kernel(0.0, 0.0, 0.0, fine()), e_beta_kernel(0.0, 0.0, 0.0), 1e-8);
}

TEST(EKernel, ReflectedTermMatchesDisplayedIntegral) {
  const double beta = 1.3;
  const double a = -0.4;
  for (double u : {0.0, 0.7}) {
    for (double v : {0.0, 1.1}) {
      const double b2 = beta * beta;
      const double ref =
          std::exp(beta * (v - u)) *
          integrate(
              [&](double z) {
                return std::exp(-2.0 * beta * z) * airy_ai(b2 + a + u + z) * airy_ai(b2 + a + v - z);
              },
              0.0, 40.0);
      EXPECT_NEAR(e_beta_reflected_term(beta, u + a, v + a), ref, 1e-10) << u << "," << v;
    }
  }
}

TEST(EKernel, DirectTermMatchesIntegral) {
  const double beta = 0.8;
  const double u = 0.3, v = -0.2;
  const double b2 = beta * beta;
  const double ref =
      std::exp(beta * (v - u)) *
      integrate([&](double z) { return airy_ai(u + z + b2) * airy_ai(v + z + b2); }, 0.0, 40.0);
  EXPECT_NEAR(e_beta_direct_term(beta, u, v), ref, 1e-11);
}

TEST(EKernel, DecaysWithBeta) {
  const double e0 = e_beta_kernel(0.0, 0.0, 0.0);
  EXPECT_LE(std::abs(e_beta_kernel(2.0, 0.0, 0.0)), std::exp(-4.0) * std::abs(e0));
}

TEST(EShiftKernel, ZeroShiftReducesToPlainKernel) {
  for (double beta : {0.0, 1.0, 2.5}) {
    EXPECT_DOUBLE_EQ(e_beta_shift_kernel(beta, 0.0, 0.2, -0.3), e_beta_kernel(beta, 0.2, -0.3));
  }
}

TEST(EShiftKernel, DegenerateScaleRejected) {
  EXPECT_THROW(e_beta_shift_kernel(0.0, 0.5, 0.0, 0.0), std::domain_error);
}

TEST(EShiftKernel, StableUnderInnerGridDoubling) {
  const double coarse = e_beta_shift_kernel(2.0, 0.5, 0.0, 0.0);
  EXPECT_TRUE(std::isfinite(coarse));
  EXPECT_NEAR(e_beta_shift_kernel(2.0, 0.5, 0.0, 0.0, fine()), coarse, 1e-8);
}

TEST(EShiftKernel, DecaysInU) {
  const double near = std::abs(e_beta_shift_kernel(2.0, 0.5, 0.0, 0.0));
  const double far = std::abs(e_beta_shift_kernel(2.0, 0.5, 12.0, 0.0));
  EXPECT_LT(far, 1e-6 * std::max(near, 1e-300) + 1e-20);
}

TEST(EffectiveKernel, BetaZeroReproducesGoeDeterminant) {
  for (double a : {-2.0, 0.0, 1.0}) {
    const auto g = make_grid(a, 12.0, 64);
    const double direct = fredholm_det(effective_product_kernel(0.0, 0.0, g));
    EXPECT_NEAR(direct, fredholm_det(goe_operator(g)), 1e-6) << "a=" << a;
  }
}

TEST(EffectiveKernel, DeterminantTendsToOneForLargeLevel) {
  for (double beta : {0.5, 2.0, 4.0}) {
    EXPECT_NEAR(softshock_determinant({beta, 0.0, 8.0}).value, 1.0, 1e-8) << beta;
  }
}

TEST(EffectiveKernel, DirectAndFactoredRoutesAgree) {
  const SoftShockParams p{2.0, 0.0, -0.5};
  const double d = softshock_determinant(p, {}, DetRoute::Direct).raw;
  const double f = softshock_determinant(p, {}, DetRoute::Factored).raw;
  EXPECT_NEAR(d, f, 1e-8);
  const SoftShockParams q{1.25, 0.5, 0.0};
  EXPECT_NEAR(softshock_determinant(q, {}, DetRoute::Direct).raw,
              softshock_determinant(q, {}, DetRoute::Factored).raw, 1e-6);
}

TEST(EffectiveKernel, BetaFourNearSquaredGoe) {
  const double f0 = fredholm_det(goe_operator(make_grid(0.0, 12.0, 64)));
  const double v = softshock_determinant({4.0, 0.0, 0.0}).value;
  EXPECT_LT(std::abs(v - f0 * f0), 1.0 / 4.0);
}

TEST(EffectiveKernel, FactoredApproximationGapShrinks) {
  // |full - det(I - A - E)^2| at beta = 4 stays below C / beta, C from beta = 2.
  const double g2 = std::abs(softshock_determinant({2.0, 0.0, 0.0}).raw -
                             factored_approximation(2.0, 0.0, 0.0));
  const double g4 = std::abs(softshock_determinant({4.0, 0.0, 0.0}).raw -
                             factored_approximation(4.0, 0.0, 0.0));
  EXPECT_LT(g4, 2.0 * g2 / 4.0 + 1e-12);
}

TEST(EffectiveKernel, InvalidParametersRejected) {
  EXPECT_THROW(softshock_determinant({-1.0, 0.0, 0.0}), std::domain_error);
  EXPECT_THROW(softshock_determinant({0.0, 0.5, 0.0}), std::domain_error);
  EXPECT_THROW(softshock_determinant({0.0, 0.0, 0.0}, {}, DetRoute::Factored), std::domain_error);
}

TEST(Hypo, ClosedFormBranches) {
  EXPECT_NEAR(hypo_closed_form(1.0, 0.5, 0.3), std::exp(1.0) * airy_ai(0.8), 1e-14);
  EXPECT_NEAR(hypo_closed_form(1.0, -0.5, 0.3), airy_ai(0.8), 1e-14);
}

TEST(Hypo, MonteCarloMatchesClosedForm) {
  const auto est = brownian_hypo_estimates(1.0, 0.5, {0.0, 1.0}, 20000, 1e-3, 20.0, 9);
  for (std::size_t j = 0; j < est.size(); ++j) {
    const double cf = hypo_closed_form(1.0, 0.5, j == 0 ? 0.0 : 1.0);
    EXPECT_LT(std::abs(est[j].mean - cf), 4.0 * est[j].std_error) << j;
    EXPECT_GT(est[j].std_error, 0.0);
  }
}

TEST(Hypo, ThreadCountDoesNotChangeResult) {
  const auto a = brownian_hypo_estimate(1.0, 0.25, 0.3, 9000, 1e-3, 20.0, 4, 1);
  const auto b = brownian_hypo_estimate(1.0, 0.25, 0.3, 9000, 1e-3, 20.0, 4, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Hypo, DomainChecks) {
  EXPECT_THROW(brownian_hypo_estimate(1.0, -0.1, 0.0, 10, 1e-3, 1.0, 1), std::domain_error);
  EXPECT_THROW(brownian_hypo_estimate(0.0, 0.5, 0.0, 10, 1e-3, 1.0, 1), std::domain_error);
  EXPECT_THROW(brownian_hypo_estimate(1.0, 0.5, 0.0, 0, 1e-3, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(brownian_hypo_estimate(1.0, 0.5, 0.0, 10, 0.0, 1.0, 1), std::invalid_argument);
  const auto z = brownian_hypo_estimate(1.0, 0.0, 0.4, 10, 1e-3, 1.0, 1);
  EXPECT_EQ(z.std_error, 0.0);
  EXPECT_NEAR(z.mean, airy_ai(0.4), 1e-14);
}
