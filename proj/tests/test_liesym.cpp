#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "genlie/calculus.hpp"
#include "genlie/error.hpp"
#include "genlie/factorization.hpp"
#include "genlie/group_action.hpp"
#include "genlie/mollifier.hpp"
#include "genlie/parse.hpp"
#include "genlie/simplify.hpp"
#include "genlie/system.hpp"
#include "oracles.hpp"

using namespace genlie;

namespace {

JetSpace xt2() { return JetSpace({"x", "t"}, {"u"}, 2); }

Context ctx_for(const JetSpace& j) {
  Context c = Context::standard();
  c.jets = j;
  c.declare({"phi", {"u"}, ""});
  c.declare({"f", {"u"}, ""});
  return c;
}

GenFunc scale_by(const GenFunc& g, double c) {
  return GenFunc(g.arity(), [g, c](std::span<const double> x, double eps) { return c * g(x, eps); }, g.domain());
}

oracle::Jet random_jet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  oracle::Jet z;
  for (auto& v : z) v = u(rng);
  return z;
}

Bindings jet_bindings(const oracle::Jet& z) {
  return {{"x", z[0]},    {"t", z[1]},     {"u", z[2]},     {"u_x", z[3]},
          {"u_t", z[4]},  {"u_xx", z[5]},  {"u_xt", z[6]},  {"u_tt", z[7]}};
}

struct Case {
  const char* name;
  std::vector<const char*> xi;
  const char* phi;
  oracle::Field f;
};

std::vector<Case> prolongation_cases() {
  return {
      {"translation", {"1", "0"}, "0", [](double, double, double) { return std::array<double, 3>{1, 0, 0}; }},
      {"boost", {"-t", "-x"}, "u^2 - 1",
       [](double x, double t, double u) { return std::array<double, 3>{-t, -x, u * u - 1}; }},
      {"fibre", {"0", "0"}, "sin(u) + u^2/2",
       [](double, double, double u) { return std::array<double, 3>{0, 0, std::sin(u) + 0.5 * u * u}; }},
  };
}

}  // namespace

TEST(Prolong, TranslationHasZeroCoefficients) {
  JetSpace j = xt2();
  Context c = ctx_for(j);
  ProlongedField pr = prolong(VectorField(j, {Expr(1), Expr(0)}, {Expr(0)}), 2);
  for (const auto& k : pr.coefficients) EXPECT_TRUE(k.value.is_zero()) << k.jet;
}

TEST(Prolong, HopfBoostFirstOrder) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  VectorField v(j, {parse("-t", c), parse("-x", c)}, {parse("u^2 - 1", c)});
  ProlongedField pr = prolong(v, 1);
  EXPECT_EQ(pr.coefficient(0, {1, 0}), parse("2*u*u_x + u_t", c));
  EXPECT_EQ(pr.coefficient(0, {0, 1}), parse("2*u*u_t + u_x", c));
}

TEST(Prolong, FibreFieldSecondOrder) {
  JetSpace j = xt2();
  Context c = ctx_for(j);
  ProlongedField pr = prolong(VectorField(j, {Expr(0), Expr(0)}, {parse("phi", c)}), 2);
  EXPECT_EQ(pr.coefficient(0, {1, 0}), parse("phi_u*u_x", c));
  EXPECT_TRUE(compare_by_sampling(pr.coefficient(0, {2, 0}), parse("phi_uu*u_x^2 + phi_u*u_xx", c), 50, 1, 1e-12)
                  .equivalent);
  EXPECT_THROW(pr.coefficient(0, {3, 0}), InputError);
}

TEST(Prolong, MatchesNumericJetTransport) {
  JetSpace j = xt2();
  Context c = ctx_for(j);
  std::mt19937_64 rng(2);
  for (const auto& k : prolongation_cases()) {
    std::vector<Expr> xi;
    for (const char* s : k.xi) xi.push_back(parse(s, c));
    ProlongedField pr = prolong(VectorField(j, xi, {parse(k.phi, c)}), 2);
    const std::vector<std::vector<int>> jets{{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    for (int s = 0; s < 20; ++s) {
      oracle::Jet z = random_jet(rng);
      auto want = oracle::prolonged_coefficients(k.f, z);
      for (std::size_t n = 0; n < jets.size(); ++n) {
        double got = evaluate(pr.coefficient(0, jets[n]), jet_bindings(z));
        EXPECT_NEAR(got, want[n], 1e-5 * std::max(1.0, std::abs(want[n]))) << k.name << " jet " << n;
      }
    }
  }
}

TEST(Property, ProlongationIsLinear) {
  JetSpace j = xt2();
  Context c = ctx_for(j);
  VectorField v(j, {parse("x*t", c), parse("t^2", c)}, {parse("u*x", c)});
  VectorField w(j, {parse("sin(t)", c), parse("1", c)}, {parse("exp(u) + t", c)});
  ProlongedField lhs = prolong(add(scale(v, Expr(2)), scale(w, Expr(-3))), 2);
  ProlongedField pv = prolong(v, 2), pw = prolong(w, 2);
  ASSERT_EQ(lhs.coefficients.size(), pv.coefficients.size());
  for (std::size_t k = 0; k < lhs.coefficients.size(); ++k) {
    Expr rhs = Expr(2) * pv.coefficients[k].value - Expr(3) * pw.coefficients[k].value;
    EXPECT_TRUE(expand(lhs.coefficients[k].value - rhs).is_zero()) << lhs.coefficients[k].jet;
  }
}

TEST(Infinitesimal, HopfBoostGivesThreeUDelta) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  DifferentialSystem sys(j, {parse("u_t + u*u_x", c)});
  auto r = apply_infinitesimal(VectorField(j, {parse("-t", c), parse("-x", c)}, {parse("u^2 - 1", c)}), sys);
  EXPECT_TRUE(expand(r[0] - parse("3*u*(u_t + u*u_x)", c)).is_zero()) << r[0];
  EXPECT_TRUE(apply_infinitesimal(VectorField::zero(j), sys)[0].is_zero());
}

TEST(Infinitesimal, TransportFieldRestrictsToMultiple) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  DifferentialSystem sys(j, {parse("u_t + lambda*u_x - f", c)});
  auto r = apply_infinitesimal(VectorField(j, {Expr(0), Expr(0)}, {parse("c*f", c)}), sys);
  EXPECT_TRUE(compare_by_sampling(r[0], parse("c*f_u*(u_t + lambda*u_x - f)", c), 50, 1, 1e-12).equivalent);
}

TEST(Determining, TransportAnsatzAdmitsMultipleOfF) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  DifferentialSystem sys(j, {parse("u_t + lambda*u_x - f", c)});
  sys.solve_for(0, parse("u_t", c));
  DeterminingEquations de = determining_equations(sys, VectorField(j, {Expr(0), Expr(0)}, {parse("phi", c)}));
  ASSERT_FALSE(de.equations.empty());
  for (const Expr& e : de.equations) {
    Expr s = instantiate(e, "phi", {"u"}, parse("k*f", c));
    EXPECT_TRUE(compare_by_sampling(s, Expr(0), 50, 1, 1e-12).equivalent) << e;
  }
}

TEST(Determining, NeedsSolvedForm) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  DifferentialSystem sys(j, {parse("u_t + u*u_x", c)});
  EXPECT_THROW(determining_equations(sys, VectorField::zero(j)), InputError);
  EXPECT_THROW(sys.solve_for(0, parse("u_x", c)), InputError);
}

TEST(Ogth, CriterionScan) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  OgthVerdict h = ogth_criterion(DifferentialSystem(j, {parse("u_t + u*u_x", c)}));
  EXPECT_TRUE(h.met);
  EXPECT_EQ(h.k, 5u);
  EXPECT_EQ(h.coordinate, parse("u_t", c));
  EXPECT_TRUE(h.c.is_one());
  OgthVerdict t = ogth_criterion(DifferentialSystem(j, {parse("u_t + lambda*u_x - f", c)}));
  EXPECT_TRUE(t.met);
  EXPECT_EQ(t.coordinate, parse("u_t", c));
  EXPECT_FALSE(ogth_criterion(DifferentialSystem(j, {parse("u_t^2 - u_x^2", c)})).met);
}

TEST(Flow, BoostFibreIsClosedForm) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  GroupAction g = flow(VectorField(j, {parse("-t", c), parse("-x", c)}, {parse("u^2 - 1", c)}));
  EXPECT_TRUE(g.closed_form());
  double x[2] = {0.3, 0.2}, u[1] = {0.4}, xo[2], uo[1];
  g.apply(0.8, x, u, 0.1, xo, uo);
  EXPECT_NEAR(uo[0], -std::tanh(0.8 - std::atanh(0.4)), 1e-14);
  EXPECT_NEAR(xo[0], 0.3 * std::cosh(0.8) - 0.2 * std::sinh(0.8), 1e-14);
  EXPECT_NEAR(xo[1], 0.2 * std::cosh(0.8) - 0.3 * std::sinh(0.8), 1e-14);
  EXPECT_TRUE(check_group_law(g).pass);
}

TEST(Flow, RegisteredPrimitive) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  auto reg = std::make_shared<FunctionRegistry>();
  reg->define("f", {"u"}, parse("exp(-u)"));
  reg->define("P", {"u"}, parse("exp(u)"));
  reg->define("Pinv", {"u"}, parse("log(u)"));
  FlowOptions fo;
  fo.registry = reg;
  fo.primitives = {{"f", "P", "Pinv"}};
  GroupAction g = flow(VectorField(j, {Expr(0), Expr(0)}, {parse("2*f", c)}), fo);
  EXPECT_TRUE(g.closed_form());
  double x[2] = {0, 0}, u[1] = {0.3}, xo[2], uo[1];
  g.apply(0.5, x, u, 0.1, xo, uo);
  EXPECT_NEAR(uo[0], std::log(1.0 + std::exp(0.3)), 1e-14);
}

TEST(Flow, NumericFallbackMatchesExactSolution) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  GroupAction g = flow(VectorField(j, {Expr(0), Expr(0)}, {parse("sin(u)", c)}));
  EXPECT_FALSE(g.closed_form());
  double x[2] = {0, 0}, u[1] = {0.7}, xo[2], uo[1];
  g.apply(1.3, x, u, 0.1, xo, uo);
  EXPECT_NEAR(uo[0], 2.0 * std::atan(std::exp(1.3) * std::tan(0.35)), 1e-8);
  EXPECT_TRUE(check_group_law(g).pass);
}

TEST(Flow, BlowUpIsReported) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  GroupAction g = flow(VectorField(j, {Expr(0), Expr(0)}, {parse("u^2", c)}));
  double x[2] = {0, 0}, u[1] = {1.0}, xo[2], uo[1];
  g.apply(0.5, x, u, 0.1, xo, uo);
  EXPECT_NEAR(uo[0], 2.0, 1e-6);
  EXPECT_THROW(g.apply(1.5, x, u, 0.1, xo, uo), ComputationError);
}

TEST(Flow, ZeroFieldIsIdentity) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  GroupAction g = flow(VectorField::zero(j));
  double x[2] = {0.1, 0.2}, u[1] = {0.3}, xo[2], uo[1];
  g.apply(2.0, x, u, 0.1, xo, uo);
  EXPECT_EQ(xo[0], 0.1);
  EXPECT_EQ(xo[1], 0.2);
  EXPECT_EQ(uo[0], 0.3);
}

TEST(Action, TransportRepresentative) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  GroupAction g = flow(VectorField(j, {Expr(0), Expr(0)}, {parse("tanh(u)", c)}));
  Box b = Box::rect(-1, 1, 0, 1);
  GenFunc u = GenFunc::from_expr(parse("sin(x/eps)*exp(t)"), {"x", "t"}, b);
  ActionResult a = apply_action({u}, g, 0.7, b);
  double p[2] = {0.2, 0.4};
  double eps = 0.05;
  EXPECT_NEAR(a.functions[0](p, eps), std::asinh(std::exp(0.7) * std::sinh(u(p, eps))), 1e-13);
  EXPECT_TRUE(a.slow.slowly_increasing);
  ActionResult same = apply_action({u}, g, 0.0, b);
  EXPECT_DOUBLE_EQ(same.functions[0](p, eps), u(p, eps));
}

TEST(Action, BoostFibreIsDomainLimited) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  GroupAction g = flow(VectorField(j, {parse("-t", c), parse("-x", c)}, {parse("u^2 - 1", c)}));
  SlowIncrease s = slow_increase(g, 0.5, Box::rect(-1, 1, 0, 1));
  EXPECT_TRUE(s.domain_limited);
}

TEST(Property, GroupLawHoldsForCatalogFlows) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  std::vector<VectorField> fields{
      VectorField(j, {parse("-t", c), parse("-x", c)}, {parse("u^2 - 1", c)}),
      VectorField(j, {Expr(0), Expr(0)}, {parse("tanh(u)", c)}),
      VectorField(j, {Expr(0), Expr(0)}, {parse("tanh(u/eps)", c)}),
      VectorField(j, {parse("x", c), parse("2*t", c)}, {parse("-u + 1", c)}),
      VectorField(j, {Expr(0), Expr(0)}, {parse("cos(u)", c)}),
  };
  for (const auto& v : fields) {
    GroupLawReport r = check_group_law(flow(v));
    EXPECT_TRUE(r.pass) << v.str() << " id " << r.identity_error << " comp " << r.composition_error;
  }
}

TEST(Factorization, IdentityActionHasUnitFactor) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  DifferentialSystem sys(j, {parse("u_t + u*u_x", c)});
  sys.solve_for(0, parse("u_t", c));
  FactorizationReport r = factorization_check(sys, GroupAction::identity(j).with_exprs({parse("x", c), parse("t", c)}, {parse("u", c)}), 0.5);
  EXPECT_TRUE(r.pass);
  for (double q : r.q) EXPECT_NEAR(q, 1.0, 1e-12);
}

TEST(Factorization, HopfBoostFactorPlacements) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  DifferentialSystem sys(j, {parse("u_t + u*u_x", c)});
  sys.solve_for(0, parse("u_t", c));
  GroupAction g = flow(VectorField(j, {parse("-t", c), parse("-x", c)}, {parse("u^2 - 1", c)}));
  FactorizationReport line = factorization_check(sys, g, 0.7);
  EXPECT_TRUE(line.pass) << line.max_rel_error;
  FactorizationReport derived = factorization_check(sys, g, 0.7, {}, parse("cosh(artanh(u))^3/cosh(artanh(u) - eta)^3"));
  EXPECT_TRUE(derived.pass) << derived.max_rel_error;
  for (std::size_t k = 0; k < line.q.size(); ++k) EXPECT_NEAR(line.q[k], derived.q[k], 1e-10 * std::abs(derived.q[k]));
  FactorizationReport printed =
      factorization_check(sys, g, 0.7, {}, parse("1/(cosh(artanh(u - eta))^3*cosh(artanh(u)))"));
  EXPECT_FALSE(printed.pass);
}

TEST(Factorization, TransportLineIntegralMatchesResidualRatio) {
  JetSpace j({"x", "t"}, {"u"}, 1);
  Context c = ctx_for(j);
  DifferentialSystem sys(j, {parse("u_t - tanh(u)", c)});
  sys.solve_for(0, parse("u_t", c));
  GroupAction g = flow(VectorField(j, {Expr(0), Expr(0)}, {parse("tanh(u)", c)}));
  FactorizationReport r = factorization_check(sys, g, 0.6);
  EXPECT_TRUE(r.pass);
  // Oracle: Delta(pr g z) / Delta(z) at non-solution jets, with u~ = arsinh(e^eta sinh u)
  // and u~_t = cosh(u) e^eta u_t / cosh(u~).
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const auto& z = r.points[k];  // x, t, u, u_x, u_t
    double ut = std::asinh(std::exp(0.6) * std::sinh(z[2]));
    double ut_t = std::exp(0.6) * std::cosh(z[2]) / std::cosh(ut) * z[4];
    double ratio = (ut_t - std::tanh(ut)) / (z[4] - std::tanh(z[2]));
    if (std::abs(z[4] - std::tanh(z[2])) < 1e-3) continue;
    EXPECT_NEAR(r.q[k], ratio, 1e-6 * std::max(1.0, std::abs(ratio)));
  }
}

TEST(Algsymg, TangentAndTransversalFields) {
  Box b = Box::rect(-1, 1, -1, 1);
  Mollifier rho = Mollifier::bump();
  std::shared_ptr<const BumpCdf> H = std::make_shared<BumpCdf>(rho);
  // F(x1, x2) = x2 - h_eps(x1); X = (1, h_eps'(x1)) is tangent to F = 0.
  GenFunc one = GenFunc::constant(1.0, b);
  GenFunc slope(2, [rho](std::span<const double> x, double eps) { return rho.scaled(0, x[0], eps); }, b);
  GenFunc f = GenFunc(2, [H](std::span<const double> x, double eps) { return x[1] - (*H)(x[0] / eps); }, b)
                  .with_partial([slope, one](std::size_t var) { return var == 0 ? scale_by(slope, -1.0) : one; });
  EpsLadder ladder{0.5, 0.5, 12};
  std::vector<GeneralizedPoint> pts;
  for (double a : {-0.3, 0.0, 0.2}) {
    pts.push_back({[H, a](double eps) { return std::vector<double>{a * eps, (*H)(a)}; }});
  }
  pts.push_back({[](double) { return std::vector<double>{0.5, 0.0}; }});  // off the level set
  AlgsymgReport tangent = algsymg_check(f, GeneralizedField{{one, slope}}, pts, ladder);
  EXPECT_TRUE(tangent.pass);
  EXPECT_EQ(tangent.skipped.size(), 1u);
  AlgsymgReport transversal = algsymg_check(f, GeneralizedField{{GenFunc::constant(0.0, b), one}}, pts, ladder);
  EXPECT_FALSE(transversal.pass);
  for (const auto& p : transversal.points) EXPECT_FALSE(p.tangent);
}
