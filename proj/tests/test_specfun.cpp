#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <limits>

#include "softshock/specfun.hpp"

using softshock::airy_ai;
using softshock::airy_ai_arg_shifted;

namespace {

double plain(const softshock::AiryValue& a) { return a.value * std::exp(a.log_scale); }

// Maclaurin series of Ai evaluated in long double; reliable for |x| <= 2.
long double series_ai(long double x) {
  const long double c1 = 0.355028053887817239260063186004183176L;
  const long double c2 = 0.258819403792806798405183560189203963L;
  long double f = 1.0L, g = x, sf = 1.0L, sg = x;
  for (int k = 1; k < 60; ++k) {
    f *= x * x * x / ((3.0L * k - 1.0L) * (3.0L * k));
    g *= x * x * x / ((3.0L * k) * (3.0L * k + 1.0L));
    sf += f;
    sg += g;
  }
  return c1 * sf - c2 * sg;
}

}  // namespace

TEST(Airy, ValueAtZeroMatchesClosedForm) {
  const double expected = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
  EXPECT_NEAR(plain(airy_ai(0.0)), expected, 1e-15);
  EXPECT_NEAR(plain(airy_ai(0.0)), 0.35502805388781723926, 1e-15);
}

TEST(Airy, ValueAtOneMatchesSeries) {
  EXPECT_NEAR(plain(airy_ai(1.0)), static_cast<double>(series_ai(1.0L)), 1e-15);
  EXPECT_NEAR(plain(airy_ai(1.0)), 0.13529241631288141552, 1e-15);
}

TEST(Airy, RelativeErrorAgainstBoostOnCentralRange) {
  for (double x = -8.0; x <= 8.0; x += 0.0137) {
    const auto a = airy_ai(x);
    const double ref = boost::math::airy_ai(x);
    const double refp = boost::math::airy_ai_prime(x);
    const double got = plain(a);
    const double gotp = a.derivative * std::exp(a.log_scale);
    // Near zeros of Ai use the local scale |Ai| + |Ai'| instead.
    const double scale = std::abs(ref) + std::abs(refp) * 1e-3 + 1e-300;
    EXPECT_LE(std::abs(got - ref) / std::max(std::abs(ref), 1e-3 * scale), 1e-11) << "x=" << x;
    EXPECT_LE(std::abs(gotp - refp) / std::max(std::abs(refp), 1e-3 * (std::abs(refp) + std::abs(ref))),
              1e-11)
        << "x=" << x;
  }
}

TEST(Airy, ScaledFormBeyondEight) {
  for (double x : {8.5, 10.0, 20.0, 50.0}) {
    const auto a = airy_ai(x);
    EXPECT_NEAR(a.log_scale, -2.0 / 3.0 * std::pow(x, 1.5), 1e-12 * std::pow(x, 1.5));
    const double ref = boost::math::airy_ai(x);
    EXPECT_NEAR(plain(a) / ref, 1.0, 1e-9) << "x=" << x;
  }
}

TEST(Airy, NegativeAsymptoticRegionAgainstBoost) {
  for (double x : {-8.5, -10.0, -15.0, -25.0}) {
    const double ref = boost::math::airy_ai(x);
    EXPECT_NEAR(plain(airy_ai(x)), ref, 1e-10) << "x=" << x;
  }
}

TEST(Airy, HugeArgumentStaysFinite) {
  const auto a = airy_ai(1e6);
  EXPECT_TRUE(std::isfinite(a.value));
  EXPECT_TRUE(std::isfinite(a.log_scale));
  EXPECT_GT(a.value, 0.0);
  EXPECT_EQ(plain(a), 0.0);
}

TEST(Airy, NonFiniteInputIsDomainError) {
  EXPECT_THROW(airy_ai(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  EXPECT_THROW(airy_ai(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST(Airy, OdeResidualOnGrid) {
  // Second derivative by a fourth-order central stencil on the derivative.
  const double h = 1e-3;
  auto d = [](double z) {
    const auto v = airy_ai(z);
    return v.derivative * std::exp(v.log_scale);
  };
  for (int i = -100; i <= 100; ++i) {
    const double x = 0.1 * i;
    const double d2 = (-d(x + 2 * h) + 8 * d(x + h) - 8 * d(x - h) + d(x - 2 * h)) / (12 * h);
    const double ai = plain(airy_ai(x));
    const double tol = 1e-8 * (1.0 + std::abs(x)) * std::max(std::abs(ai), 1e-300);
    EXPECT_LE(std::abs(d2 - x * ai), tol) << "x=" << x;
  }
}

TEST(Airy, MonotoneDecayOnPositiveAxis) {
  double prev = plain(airy_ai(0.0));
  for (double x = 0.05; x <= 20.0; x += 0.05) {
    const auto a = airy_ai(x);
    // Compare in log space so values far below the double range still order.
    const double cur = std::log(a.value) + a.log_scale;
    EXPECT_LT(cur, std::log(prev)) << "x=" << x;
    prev = std::exp(cur);
    if (prev == 0.0) prev = std::numeric_limits<double>::min();
  }
}

TEST(Airy, DecayBound) {
  for (double x = 0.0; x <= 20.0; x += 0.1) {
    const auto a = airy_ai(x);
    const double log_ai = std::log(a.value) + a.log_scale;
    EXPECT_LE(log_ai, std::log(0.36) - 2.0 / 3.0 * std::pow(x, 1.5) + 1e-12) << "x=" << x;
  }
}

TEST(Airy, ShiftedArgument) {
  EXPECT_NEAR(airy_ai_arg_shifted(0.0, 0.0), 0.35502805388781723926, 1e-15);
  EXPECT_DOUBLE_EQ(airy_ai_arg_shifted(5.0, -5.0), plain(airy_ai(0.0)));
  EXPECT_NO_THROW(airy_ai_arg_shifted(100.0, 0.0));
  EXPECT_GE(airy_ai_arg_shifted(100.0, 0.0), 0.0);
  EXPECT_LT(airy_ai_arg_shifted(100.0, 0.0), 1e-280);
}
