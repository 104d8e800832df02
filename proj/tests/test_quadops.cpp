#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <random>

#include "softshock/kernels.hpp"
#include "softshock/quadops.hpp"

using namespace softshock;

TEST(Grid, TwoPointRuleOnReferenceInterval) {
  const auto g = make_grid(-1.0, 2.0, 2);
  ASSERT_EQ(g.nodes.size(), 2u);
  EXPECT_NEAR(g.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(g.weights[1], 1.0, 1e-15);
}

TEST(Grid, AffineShift) {
  const auto g = make_grid(0.0, 2.0, 2);
  EXPECT_NEAR(g.nodes[0], 1.0 - 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g.nodes[1], 1.0 + 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(Grid, WeightsSumToLengthAndNodesIncrease) {
  for (int n : {2, 7, 64, 200}) {
    const auto g = make_grid(0.3, 10.0, n);
    double s = 0.0;
    for (double w : g.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 10.0, 1e-11);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      EXPECT_GT(g.nodes[i], 0.3);
      EXPECT_LT(g.nodes[i], 10.3);
      if (i > 0) {
        EXPECT_GT(g.nodes[i], g.nodes[i - 1]);
      }
    }
  }
}

TEST(Grid, RejectsBadArguments) {
  EXPECT_THROW(make_grid(0.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(make_grid(0.0, 0.0, 4), std::invalid_argument);
  EXPECT_THROW(make_grid(0.0, -1.0, 4), std::invalid_argument);
}

TEST(Discretize, ZeroAndConstantKernels) {
  const auto g = make_grid(-1.0, 2.0, 2);
  const auto z = discretize({[](double, double) { return 0.0; }, "zero"}, g);
  EXPECT_EQ(z.matrix().norm(), 0.0);
  const auto one = discretize({[](double, double) { return 1.0; }, "one"}, g);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(one.matrix()(i, j), 1.0, 1e-15);
}

TEST(Discretize, NonFiniteValueNamesThePoint) {
  const auto g = make_grid(0.0, 1.0, 4);
  try {
    discretize({[](double u, double) { return u > 0.5 ? NAN : 0.0; }, "bad"}, g);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("(u, v)"), std::string::npos) << e.what();
  }
}

TEST(Discretize, GoeKernelIsSymmetric) {
  const auto op = discretize(goe_kernel_fn(), make_grid(0.0, 12.0, 64));
  EXPECT_LT((op.matrix() - op.matrix().transpose()).norm(), 1e-14);
}

TEST(Fredholm, ZeroOperatorHasDeterminantOne) {
  EXPECT_EQ(fredholm_det(DiscreteOperator::zero(make_grid(0.0, 1.0, 8))), 1.0);
}

TEST(Fredholm, RankOneIdentity) {
  auto f = [](double u) { return std::exp(-u) * 0.7; };
  const auto g = make_grid(0.0, 8.0, 48);
  const auto op = discretize({[&](double u, double v) { return f(u) * f(v); }, "rank1"}, g);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * f(g.nodes[i]) * f(g.nodes[i]);
  EXPECT_NEAR(fredholm_det(op), 1.0 - s, 1e-13);
  // Exact integral of f^2 over (0, 8).
  EXPECT_NEAR(fredholm_det(op), 1.0 - 0.49 * 0.5 * (1.0 - std::exp(-16.0)), 1e-12);
}

TEST(Fredholm, GoeDeterminantStableUnderRefinementAndTruncation) {
  const double base = fredholm_det(goe_operator(make_grid(0.0, 12.0, 64)));
  EXPECT_NEAR(fredholm_det(goe_operator(make_grid(0.0, 12.0, 128))), base, 1e-8);
  EXPECT_NEAR(fredholm_det(goe_operator(make_grid(0.0, 16.0, 64))), base, 1e-8);
}

TEST(Fredholm, RefinementInvariantOverLevels) {
  for (double a = -3.0; a <= 3.0; a += 1.0) {
    const double d = fredholm_det(goe_operator(make_grid(a, 12.0, 64)));
    EXPECT_NEAR(fredholm_det(goe_operator(make_grid(a, 12.0, 128))), d, 1e-7) << "a=" << a;
    EXPECT_NEAR(fredholm_det(goe_operator(make_grid(a, 16.0, 64))), d, 1e-7) << "a=" << a;
  }
}

TEST(TraceNorm, ZeroAndDiagonal) {
  const auto g = make_grid(0.0, 1.0, 5);
  EXPECT_EQ(trace_norm(DiscreteOperator::zero(g)), 0.0);
  const std::vector<double> d = {1.0, -2.0, 0.5, 3.0, -0.25};
  EXPECT_NEAR(trace_norm(DiscreteOperator::diagonal(g, d)), 6.75, 1e-12);
}

TEST(TraceNorm, CorrectionKernelDecaysFasterThanCubicExponential) {
  QuadConfig cfg;
  const auto g = make_grid(0.0, cfg.length, cfg.nodes);
  const double n1 = trace_norm(e_beta_operator(1.0, g, cfg));
  const double n15 = trace_norm(e_beta_operator(1.5, g, cfg));
  const double n2 = trace_norm(e_beta_operator(2.0, g, cfg));
  EXPECT_GT(n1, 0.0);
  EXPECT_LT(std::log(n15) - std::log(n1), -(std::pow(1.5, 3) - 1.0));
  EXPECT_LT(std::log(n2) - std::log(n15), -(8.0 - std::pow(1.5, 3)));
}

TEST(Compose, ZeroAndIdentity) {
  const auto g = make_grid(0.0, 4.0, 16);
  const auto x = goe_operator(g);
  EXPECT_EQ(compose(DiscreteOperator::zero(g), x).matrix().norm(), 0.0);
  EXPECT_LT((compose(DiscreteOperator::identity(g), x).matrix() - x.matrix()).norm(), 1e-15);
}

TEST(Compose, GridMismatchRejected) {
  EXPECT_THROW(compose(DiscreteOperator::zero(make_grid(0.0, 4.0, 16)),
                       DiscreteOperator::zero(make_grid(0.0, 4.0, 17))),
               std::invalid_argument);
}

TEST(Compose, GoeSquaredIsAiryKernel) {
  // int_a^inf A(u, w) A(w, v) dw = 2^{-1/3} K_Ai(2^{-1/3}(u + a), 2^{-1/3}(v + a)).
  const double a = -1.0;
  const double c = std::cbrt(0.5);
  auto airy_kernel = [](double x, double y) {
    using boost::math::airy_ai;
    using boost::math::airy_ai_prime;
    if (std::abs(x - y) < 1e-9) {
      return airy_ai_prime(x) * airy_ai_prime(x) - x * airy_ai(x) * airy_ai(x);
    }
    return (airy_ai(x) * airy_ai_prime(y) - airy_ai_prime(x) * airy_ai(y)) / (x - y);
  };
  for (int n : {64, 128}) {
    const auto g = make_grid(a, 16.0, n);
    const auto sq = compose(goe_operator(g), goe_operator(g));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 7) {
      for (std::size_t j = 0; j < g.size(); j += 5) {
        const double ref = c * airy_kernel(c * (g.nodes[i] + a), c * (g.nodes[j] + a));
        worst = std::max(worst, std::abs(sq.kernel_at(i, j) - ref));
      }
    }
    EXPECT_LT(worst, 1e-10) << "n=" << n;
  }
}

TEST(Compose, TraceNormSubmultiplicative) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd;
  const auto g = make_grid(0.0, 1.0, 12);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix x(12, 12), y(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        x(i, j) = nd(rng);
        y(i, j) = nd(rng);
      }
    const DiscreteOperator ox(g, x), oy(g, y);
    EXPECT_LE(trace_norm(compose(ox, oy)), operator_norm(ox) * trace_norm(oy) * (1 + 1e-12));
  }
}
