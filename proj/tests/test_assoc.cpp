#include <cmath>

#include <gtest/gtest.h>

#include "genlie/assoc.hpp"
#include "genlie/error.hpp"
#include "genlie/mollifier.hpp"
#include "genlie/parse.hpp"
#include "genlie/quadrature.hpp"

using namespace genlie;

namespace {

const EpsLadder kLadder{0.5, 0.5, 12};

double at(const TestFunction& psi, double x) { return psi(std::span<const double>(&x, 1)); }

}  // namespace

TEST(TestFunction, BumpSupportAndDerivative) {
  TestFunction psi = bump_test_function({"x"}, {0.2}, {0.5}, {0.6}, "psi");
  EXPECT_EQ(psi.name(), "psi");
  EXPECT_EQ(at(psi, 0.75), 0.0);
  EXPECT_GT(at(psi, 0.2), 0.0);
  TestFunction d = psi.partial({1});
  double x = 0.31, h = 1e-6;
  EXPECT_NEAR(at(d, x), (at(psi, x + h) - at(psi, x - h)) / (2 * h), 1e-7);
  double l1 = integrate([&](double y) { return std::abs(at(psi, y)); }, -0.3, 0.7).value;
  EXPECT_NEAR(psi.l1_norm(), l1, 1e-8);
}

TEST(WeakPairing, DeltaSamplesTheTestFunction) {
  GenFunc d = embed_delta_derivative(0, Mollifier::bump());
  TestFunction psi = bump_test_function({"x"}, {0.1}, {0.5}, {0.4});
  // <delta_eps, psi> - psi(0) = O(eps^2) for the even bump.
  double eps = 1e-3;
  EXPECT_NEAR(weak_pairing(d, psi, eps).value, at(psi, 0.0), 1e-5);
  GenFunc d1 = embed_delta_derivative(1, Mollifier::bump());
  EXPECT_NEAR(weak_pairing(d1, psi, eps).value, -at(psi.partial({1}), 0.0), 1e-4);
}

TEST(WeakPairing, TravellingWaveInTwoDimensions) {
  Box b = Box::rect(-1.5, 1.5, -0.5, 1.5);
  GenFunc d = embed_delta_derivative(0, Mollifier::bump());
  GenFunc w = pullback_linear(d, {1.0, -1.0}, 0.0, b).with_loci({Hyperplane{{1.0, -1.0}, 0.0}});
  TestFunction psi = bump_test_function({"x", "t"}, {0.1, 0.5}, {0.6, 0.5}, {0.3, 0.2});
  // <delta(x - t), psi> = int psi(t, t) dt.
  double oracle = integrate([&](double t) {
    double p[2] = {t, t};
    return psi(p);
  }, -0.5, 1.5).value;
  EXPECT_NEAR(weak_pairing(w, psi, 1e-3).value, oracle, 1e-5);
}

TEST(Trace, ExtrapolatesAlgebraicConvergence) {
  std::vector<double> eps, vals;
  for (std::size_t k = 0; k < kLadder.size(); ++k) {
    eps.push_back(kLadder[k]);
    vals.push_back(1.25 + 0.3 * eps.back() * eps.back());
  }
  PairingTrace t = analyze_trace(eps, vals);
  EXPECT_FALSE(t.diverges);
  EXPECT_NEAR(t.limit, 1.25, 1e-12);
  EXPECT_NEAR(t.order, 2.0, 1e-6);
}

TEST(Trace, FlagsDivergence) {
  std::vector<double> eps, vals;
  for (std::size_t k = 0; k < kLadder.size(); ++k) {
    eps.push_back(kLadder[k]);
    vals.push_back(0.7 * std::pow(eps.back(), -0.5));
  }
  PairingTrace t = analyze_trace(eps, vals);
  EXPECT_TRUE(t.diverges);
  EXPECT_NEAR(t.growth_exponent, 0.5, 1e-9);
}

TEST(Trace, RoundingNoiseNearZeroIsNotDivergence) {
  std::vector<double> eps, vals;
  for (std::size_t k = 0; k < kLadder.size(); ++k) {
    eps.push_back(kLadder[k]);
    vals.push_back((k % 2 ? 1 : -1) * 1e-16 * (k + 1));
  }
  EXPECT_FALSE(analyze_trace(eps, vals).diverges);
}

TEST(Descriptor, AtomsAndRegularPart) {
  TestFunction psi = bump_test_function({"x"}, {0.1}, {0.5}, {0.4});
  DistributionDescriptor d;
  d.atoms.push_back({Hyperplane{{1.0}, 0.0}, 1, Expr(2)});
  EXPECT_NEAR(descriptor_pairing(d, psi), -2.0 * at(psi.partial({1}), 0.0), 1e-14);
  DistributionDescriptor h;
  h.regular = [](std::span<const double> x) { return x[0] > 0 ? 1.0 : 0.0; };
  h.kinks.push_back(Hyperplane{{1.0}, 0.0});
  double oracle = integrate([&](double x) { return at(psi, x); }, 0.0, 0.6).value;
  EXPECT_NEAR(descriptor_pairing(h, psi), oracle, 1e-10);
}

TEST(Association, DeltaEmbeddingAndItsNegation) {
  GenFunc d = embed_delta_derivative(0, Mollifier::bump());
  DistributionDescriptor delta;
  delta.atoms.push_back({Hyperplane{{1.0}, 0.0}, 0, Expr(1)});
  std::vector<TestFunction> battery{bump_test_function({"x"}, {0.1}, {0.5}, {0.4}, "a"),
                                    bump_test_function({"x"}, {-0.2}, {0.4}, {-0.8}, "b")};
  AssociationReport ok = association_check(d, delta, battery, kLadder, 1e-2);
  EXPECT_TRUE(ok.pass) << ok.reason;
  DistributionDescriptor twice = delta;
  twice.atoms[0].coefficient = Expr(2);
  EXPECT_FALSE(association_check(d, twice, battery, kLadder, 1e-2).pass);
}

TEST(Association, DivergentFamilyHasNoDistribution) {
  Box b = Box::interval(-1, 1);
  GenFunc d = embed_delta_derivative(0, Mollifier::bump(), b);
  GenFunc sq = mul(d, d).with_loci({Hyperplane{{1.0}, 0.0}});
  DistributionDescriptor zero;
  std::vector<TestFunction> battery{bump_test_function({"x"}, {0.1}, {0.5}, {0.4})};
  AssociationReport r = association_check(sq, zero, battery, kLadder, 1e-2);
  EXPECT_FALSE(r.pass);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_TRUE(r.entries[0].trace.diverges);
  EXPECT_NEAR(r.entries[0].trace.growth_exponent, 1.0, 0.05);
}

TEST(DeltaCoefficient, RecoversKnownCombination) {
  Box b = Box::interval(-1, 1);
  Mollifier rho = Mollifier::bump();
  GenFunc f = add(GenFunc::constant(0.5, b),
                  add(scale(embed_delta_derivative(0, rho, b), 3.0), scale(embed_delta_derivative(1, rho, b), 2.0)))
                  .with_loci({Hyperplane{{1.0}, 0.0}});
  Hyperplane locus{{1.0}, 0.0};
  auto battery = locus_battery(locus, {0.0}, {0.6});
  EXPECT_EQ(battery.size(), 5u);
  DeltaCoefficientResult r = identify_delta_coefficient(f, locus, kLadder, 1, battery);
  ASSERT_EQ(r.coefficients.size(), 3u);
  EXPECT_NEAR(r.coefficients[0], 0.5, 1e-6);
  EXPECT_NEAR(r.coefficients[1], 3.0, 1e-6);
  EXPECT_NEAR(r.coefficients[2], 2.0, 1e-6);
  EXPECT_LT(r.condition, 1e6);
}

TEST(DeltaCoefficient, IllConditionedBatteryThrows) {
  Box b = Box::interval(-1, 1);
  GenFunc f = embed_delta_derivative(0, Mollifier::bump(), b);
  std::vector<TestFunction> same(4, bump_test_function({"x"}, {0.0}, {0.5}));
  EXPECT_THROW(identify_delta_coefficient(f, Hyperplane{{1.0}, 0.0}, kLadder, 1, same), ComputationError);
}
