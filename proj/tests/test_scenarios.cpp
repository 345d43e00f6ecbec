#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "genlie/error.hpp"
#include "genlie/mollifier.hpp"
#include "genlie/scenarios.hpp"

using namespace genlie;

TEST(SignSqrt, MatchesBranchesAndIsOdd) {
  for (double y : {-0.2, -0.1, 0.0, 0.05, 0.25}) EXPECT_DOUBLE_EQ(SignSqrt::value(y), y);
  for (double y : {1.0, 2.0, 9.0}) {
    EXPECT_DOUBLE_EQ(SignSqrt::value(y), std::sqrt(y));
    EXPECT_DOUBLE_EQ(SignSqrt::value(-y), -std::sqrt(y));
  }
}

TEST(Property, SignSqrtIsIncreasingWithInverse) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    double y = d(rng);
    EXPECT_EQ(SignSqrt::value(-y), -SignSqrt::value(y));
    EXPECT_GT(SignSqrt::derivative(y), 0.0);
    EXPECT_NEAR(SignSqrt::inverse(SignSqrt::value(y)), y, 1e-12 * std::max(1.0, std::abs(y)));
    double h = 1e-5;
    double fd = (SignSqrt::value(y + h) - SignSqrt::value(y - h)) / (2 * h);
    EXPECT_NEAR(SignSqrt::derivative(y), fd, 1e-6) << y;
  }
}

TEST(Hopf, CharacteristicsCarryInitialValues) {
  HopfParams p;
  HopfCharacteristics ch(p, Mollifier::bump());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dx(-2.0, 2.0), dt(0.0, 2.0);
  for (double eps : {0.1, 1e-2, 1e-3}) {
    for (int k = 0; k < 100; ++k) {
      double x = dx(rng), t = dt(rng);
      double x0 = ch.foot(x, t, eps);
      double u = ch.u(x, t, eps);
      EXPECT_NEAR(x0 + t * u, x, 1e-12);
      EXPECT_NEAR(u, ch.u(x0, 0.0, eps), 1e-13);
      // Both components are driven by the same smoothed step.
      double lin = p.v_l + (p.v_r - p.v_l) * (u - p.u_l) / (p.u_r - p.u_l);
      EXPECT_NEAR(ch.v(x, t, eps), lin, 1e-12);
    }
  }
}

TEST(Hopf, SmallEpsApproachesFan) {
  HopfParams p;
  HopfCharacteristics ch(p, Mollifier::bump());
  for (double x : {-1.5, -0.4, -0.1, 0.0, 0.2, 0.45, 1.2}) {
    EXPECT_NEAR(ch.u(x, 1.0, 1e-4), hopf_ufan(p, x, 1.0), 2e-4) << x;
    EXPECT_NEAR(ch.v(x, 1.0, 1e-4), hopf_vfan(p, x, 1.0), 2e-4) << x;
  }
}

TEST(Hopf, FanIsContinuousAcrossEdges) {
  HopfParams p;
  for (double t : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(hopf_vfan(p, p.u_l * t * (1 - 1e-12), t), hopf_vfan(p, p.u_l * t * (1 + 1e-12), t), 1e-9);
    EXPECT_NEAR(hopf_vfan(p, p.u_r * t * (1 - 1e-12), t), hopf_vfan(p, p.u_r * t * (1 + 1e-12), t), 1e-9);
    EXPECT_DOUBLE_EQ(hopf_ufan(p, 0.0, t), 0.0);
  }
}

TEST(Hopf, BackwardWedgeIsDomainError) {
  HopfCharacteristics ch(HopfParams{}, Mollifier::bump());
  EXPECT_THROW(ch.u(0.0, -1.0, 1e-3), DomainError);
  EXPECT_NO_THROW(ch.u(3.0, -1.0, 1e-3));
}

TEST(Scenarios, NamesAndErrors) {
  auto names = scenario_names();
  for (const char* n : {"hopf", "transport", "acoustics", "nonlind", "traffic", "dalembert"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  EXPECT_THROW(make_scenario("nope"), InputError);
  EXPECT_THROW(make_scenario("traffic", {{"bogus", 1.0}}), InputError);
}

TEST(Scenarios, TrafficPasses) {
  ScenarioReport r = make_scenario("traffic").run();
  for (const auto& v : r.verdicts) EXPECT_TRUE(v.pass) << v.name << " got " << v.measured;
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.verdicts.empty());
}

TEST(Scenarios, TransportPasses) {
  ScenarioReport r = make_scenario("transport", {{"i", 0}}).run();
  for (const auto& v : r.verdicts) EXPECT_TRUE(v.pass) << v.name << " got " << v.measured;
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.traces.empty());
}

TEST(Scenarios, ReportPassIsConjunction) {
  ScenarioReport r;
  r.add({"a", ExpectedSource::Exact, 0, 0, 0, 1, true, ""});
  r.finish();
  EXPECT_TRUE(r.pass);
  r.add({"b", ExpectedSource::Oracle, 0, 2, 2, 1, false, ""});
  r.finish();
  EXPECT_FALSE(r.pass);
}
