#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "genlie/assoc.hpp"
#include "genlie/error.hpp"
#include "genlie/estimate.hpp"
#include "genlie/genfunc.hpp"
#include "genlie/mollifier.hpp"
#include "genlie/parse.hpp"
#include "genlie/quadrature.hpp"

using namespace genlie;

TEST(Mollifier, BumpHasUnitMassAndCompactSupport) {
  Mollifier rho = Mollifier::bump();
  EXPECT_NEAR(rho.moment_integral(0), 1.0, 1e-12);
  EXPECT_NEAR(rho.moment_integral(1), 0.0, 1e-14);
  EXPECT_EQ(rho(1.0), 0.0);
  EXPECT_EQ(rho(-1.5), 0.0);
  EXPECT_EQ(rho.derivative(3, 1.2), 0.0);
  EXPECT_GT(rho(0.0), 0.0);
  EXPECT_EQ(rho.support(), Support::Compact);
}

TEST(Mollifier, DerivativesMatchFiniteDifferences) {
  Mollifier rho = Mollifier::bump();
  for (double y : {-0.7, -0.2, 0.1, 0.55}) {
    for (int k = 0; k < 3; ++k) {
      double h = 1e-5;
      double fd = (rho.derivative(k, y + h) - rho.derivative(k, y - h)) / (2 * h);
      EXPECT_NEAR(rho.derivative(k + 1, y), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Mollifier, MomentKernelsCancelMoments) {
  for (int m : {0, 2, 4}) {
    Mollifier rho = Mollifier::moment(m);
    EXPECT_EQ(rho.certified_moments(), m);
    EXPECT_NEAR(rho.moment_integral(0), 1.0, 1e-10);
    for (int k = 1; k <= m; ++k) EXPECT_NEAR(rho.moment_integral(k), 0.0, 1e-9) << "m=" << m << " k=" << k;
  }
  // The Gaussian's second moment is 1; the m = 2 kernel removes it.
  EXPECT_NEAR(Mollifier::moment(0).moment_integral(2), 1.0, 1e-9);
}

TEST(Mollifier, ScaledKernelFollowsChainRule) {
  Mollifier rho = Mollifier::bump();
  double eps = 0.01, x = 0.003;
  EXPECT_NEAR(rho.scaled(1, x, eps), std::pow(eps, -2) * rho.derivative(1, x / eps), 1e-9);
}

TEST(BumpCdf, MonotoneWithCorrectLimits) {
  Mollifier rho = Mollifier::bump();
  BumpCdf H(rho);
  EXPECT_EQ(H(-1.0), 0.0);
  EXPECT_EQ(H(1.0), 1.0);
  EXPECT_NEAR(H(0.0), 0.5, 1e-12);
  double prev = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double z = -1.0 + i / 200.0;
    EXPECT_GE(H(z), prev - 1e-15);
    prev = H(z);
  }
  // H' = rho, checked against the kernel between nodes.
  for (double z : {-0.61, 0.013, 0.47}) EXPECT_NEAR((H(z + 1e-5) - H(z - 1e-5)) / 2e-5, rho(z), 1e-6);
}

TEST(EpsLadder, Values) {
  EpsLadder l{0.5, 0.5, 20};
  EXPECT_EQ(l.size(), 21u);
  EXPECT_DOUBLE_EQ(l[0], 0.5);
  EXPECT_DOUBLE_EQ(l[20], 0.5 * std::pow(0.5, 20));
  EXPECT_EQ(l.values().size(), 21u);
}

TEST(Embedding, DeltaDerivativesPairWithMonomials) {
  // <delta^(i)_eps, x^i> = (-1)^i i! for any eps, by integration by parts.
  Mollifier rho = Mollifier::bump();
  for (int i = 0; i <= 3; ++i) {
    GenFunc d = embed_delta_derivative(i, rho);
    double eps = 0.05;
    QuadResult q = integrate([&](double x) { return d(x, eps) * std::pow(x, i); }, -eps, eps,
                             feature_breakpoints(0.0, eps, -eps, eps));
    EXPECT_NEAR(q.value, (i % 2 ? -1.0 : 1.0) * std::tgamma(i + 1.0), 1e-8) << "i=" << i;
  }
}

TEST(Embedding, HeavisideIsMonotoneStep) {
  GenFunc h = embed_heaviside(Mollifier::bump());
  double eps = 0.1;
  EXPECT_EQ(h(-0.2, eps), 0.0);
  EXPECT_EQ(h(0.2, eps), 1.0);
  EXPECT_NEAR(h(0.0, eps), 0.5, 1e-12);
  // h' = delta_eps.
  GenFunc d = embed_delta_derivative(0, Mollifier::bump());
  EXPECT_NEAR(h.partial(0)(0.03, eps), d(0.03, eps), 1e-6);
}

TEST(Embedding, SmoothFunctionsConvergeUniformly) {
  GenFunc s = embed_smooth(parse("sin(x)"), Mollifier::bump());
  // (sin * rho_eps)(x) = sin(x) * int cos(eps y) rho(y) dy.
  Mollifier rho = Mollifier::bump();
  double eps = 0.2;
  double c = integrate([&](double y) { return std::cos(eps * y) * rho(y); }, -1, 1).value;
  for (double x : {-0.5, 0.1, 0.7}) EXPECT_NEAR(s(x, eps), std::sin(x) * c, 1e-9);
}

TEST(Moderateness, DeltaDerivativeExponents) {
  EpsLadder ladder{0.5, 0.5, 12};
  for (int i = 0; i <= 2; ++i) {
    GenFunc d = embed_delta_derivative(i, Mollifier::bump());
    ModeratenessResult m = moderateness_estimate(d, Box::interval(-0.5, 0.5), {0}, ladder);
    EXPECT_TRUE(m.pass);
    EXPECT_NEAR(m.exponent, i + 1.0, 0.1) << "i=" << i;
  }
}

TEST(Moderateness, DerivativeRaisesExponent) {
  EpsLadder ladder{0.5, 0.5, 12};
  GenFunc h = embed_heaviside(Mollifier::bump());
  EXPECT_NEAR(moderateness_estimate(h, Box::interval(-1, 1), {0}, ladder).exponent, 0.0, 0.1);
  EXPECT_NEAR(moderateness_estimate(h, Box::interval(-1, 1), {2}, ladder).exponent, 2.0, 0.1);
}

TEST(Negligibility, ZeroFamilyPassesEveryOrder) {
  EpsLadder ladder{0.5, 0.5, 12};
  GenFunc z = GenFunc::constant(0.0, Box::interval(-1, 1));
  NegligibilityResult n = negligibility_estimate(z, Box::interval(-1, 1), {0}, ladder, 6);
  for (bool p : n.pass) EXPECT_TRUE(p);
  EXPECT_TRUE(n.below_floor);
}

TEST(Negligibility, EpsSquaredDeltaIsNotNegligible) {
  EpsLadder ladder{0.5, 0.5, 12};
  Box b = Box::interval(-1, 1);
  GenFunc f = mul(GenFunc::eps_power(2.0, 1.0, b), embed_delta_derivative(0, Mollifier::bump(), b));
  NegligibilityResult n = negligibility_estimate(f, Box::interval(-0.5, 0.5), {0}, ladder, 6);
  EXPECT_TRUE(n.pass[0]);
  EXPECT_FALSE(n.pass[1]);
  EXPECT_NEAR(n.slope, 1.0, 0.1);
}

TEST(Negligibility, ExponentiallySmallFamily) {
  EpsLadder ladder{0.5, 0.5, 12};
  GenFunc f = GenFunc::from_expr(parse("exp(-1/eps)*sin(x)"), {"x"}, Box::interval(-1, 1));
  NegligibilityResult n = negligibility_estimate(f, Box::interval(-1, 1), {0}, ladder, 6);
  EXPECT_EQ(n.largest_q, 6);
}

TEST(Negligibility, FromTableFitsPowers) {
  std::vector<double> eps, sups;
  for (int k = 0; k < 12; ++k) {
    eps.push_back(std::pow(0.5, k + 1));
    sups.push_back(3.0 * std::pow(eps.back(), 2.5));
  }
  NegligibilityResult n = negligibility_from_table(eps, sups, 6);
  EXPECT_NEAR(n.slope, 2.5, 1e-9);
  EXPECT_EQ(n.largest_q, 2);
}

TEST(LineFit, RecoversSlope) {
  LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
}

TEST(HeavisidePower, PairingBoundOnEveryRung) {
  // h^k - h vanishes outside [-eps, eps] and |h^k - h| <= 1 there.
  Mollifier rho = Mollifier::bump();
  Box dom = Box::interval(-2, 2);
  GenFunc h = embed_heaviside(rho, dom);
  TestFunction psi = bump_test_function({"x"}, {0.1}, {0.8}, {0.7});
  EpsLadder ladder{0.5, 0.5, 12};
  double sup = psi.sup_norm();
  for (int k : {2, 3}) {
    GenFunc d = sub(power(h, k), h).with_loci({Hyperplane{{1.0}, 0.0}});
    for (std::size_t r = 0; r < ladder.size(); ++r) {
      double p = weak_pairing(d, psi, ladder[r]).value;
      EXPECT_LE(std::abs(p), 2.0 * ladder[r] * sup) << "k=" << k << " rung " << r;
    }
  }
}

TEST(Algebra, ProductRuleOnRepresentatives) {
  Box b = Box::interval(-1, 1);
  GenFunc f = GenFunc::from_expr(parse("sin(x/eps)"), {"x"}, b);
  GenFunc g = embed_heaviside(Mollifier::bump(), b);
  GenFunc lhs = derive(mul(f, g));
  GenFunc rhs = add(mul(derive(f), g), mul(f, derive(g)));
  for (double x : {-0.05, 0.01, 0.04})
    for (double eps : {0.1, 0.05}) EXPECT_NEAR(lhs(x, eps), rhs(x, eps), 1e-6 * std::max(1.0, std::abs(rhs(x, eps))));
}

TEST(Algebra, CompositionNeedsSlowIncrease) {
  Box b = Box::interval(-1, 1);
  GenFunc g = embed_delta_derivative(0, Mollifier::bump(), b);
  GenFunc t = compose(SmoothMap::tanh_map(), g);
  EXPECT_NEAR(t(0.0, 0.1), std::tanh(g(0.0, 0.1)), 1e-15);
  SmoothMap fast("exp", [](double y, double, int) { return std::exp(y); }, 8, false);
  EXPECT_THROW(compose(fast, g), ClassViolation);
}

TEST(SmoothMap, ArsinhScaledSinhIsStable) {
  // arsinh(e^a sinh y) ~ a + |y| - ... in sign(y) for large arguments.
  SmoothMap m = SmoothMap::arsinh_scaled_sinh(800.0);
  double v = m(900.0, 0.1);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 1700.0, 1e-9);
  EXPECT_NEAR(arsinh_scaled_sinh(0.3, 0.4), std::asinh(std::exp(0.3) * std::sinh(0.4)), 1e-14);
  SmoothMap e = SmoothMap::eps_arsinh_scaled_sinh(0.5);
  double eps = 0.01;
  EXPECT_NEAR(e(0.2, eps), 0.7, 1e-12);
  EXPECT_NEAR(e(-0.2, eps), -0.7, 1e-12);
}

TEST(GeneralizedNumbers, PointValuesAndEquality) {
  EpsLadder ladder{0.5, 0.5, 12};
  GenFunc f = GenFunc::from_expr(parse("x^2"), {"x"}, Box::interval(-1, 1));
  GeneralizedPoint p{[](double eps) { return std::vector<double>{eps}; }};
  GeneralizedNumber v = point_value(f, p, ladder);
  ASSERT_EQ(v.values.size(), ladder.size());
  EXPECT_DOUBLE_EQ(v.values[3], ladder[3] * ladder[3]);
  GeneralizedNumber zero{v.eps, std::vector<double>(v.eps.size(), 0.0)};
  // x_eps^2 = eps^2 is not negligible, so it is not the generalized zero.
  EXPECT_FALSE(generalized_equal(v, zero));
  GeneralizedNumber tiny = v;
  for (std::size_t k = 0; k < tiny.values.size(); ++k) tiny.values[k] = std::exp(-1.0 / tiny.eps[k]);
  EXPECT_TRUE(generalized_equal(tiny, zero));
  GeneralizedPoint far{[](double) { return std::vector<double>{3.0}; }};
  EXPECT_THROW(point_value(f, far, ladder), DomainError);
}

TEST(Pullback, TravellingDelta) {
  Box b = Box::rect(-1, 1, 0, 1);
  GenFunc d = embed_delta_derivative(0, Mollifier::bump());
  GenFunc w = pullback_linear(d, {1.0, -0.5}, 0.0, b);
  EXPECT_DOUBLE_EQ(w(0.25, 0.5, 0.1), d(0.0, 0.1));
  GenFunc e = extend_constant(d, b);
  EXPECT_DOUBLE_EQ(e(0.01, 0.7, 0.1), d(0.01, 0.1));
}
