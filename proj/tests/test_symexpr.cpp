#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "genlie/calculus.hpp"
#include "genlie/collect.hpp"
#include "genlie/error.hpp"
#include "genlie/eval.hpp"
#include "genlie/parse.hpp"
#include "genlie/simplify.hpp"

using namespace genlie;

namespace {

// Random smooth expression in x, y built from entire catalog functions.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
  std::uniform_int_distribution<int> small(-3, 3);
  switch (pick(rng)) {
    case 0: return symbol("x");
    case 1: return symbol("y");
    case 2: return Expr(Number::rational(small(rng), 2));
    case 3: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 5: return power(random_expr(rng, depth - 1), Expr(std::uniform_int_distribution<int>(2, 3)(rng)));
    case 6: return func(Fn::Sin, random_expr(rng, depth - 1));
    case 7: return func(Fn::Tanh, random_expr(rng, depth - 1));
    default: return func(Fn::Arsinh, random_expr(rng, depth - 1));
  }
}

double at(const Expr& e, double x, double y) { return evaluate(e, {{"x", x}, {"y", y}}); }

}  // namespace

TEST(Parse, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(evaluate(parse("2 + 3*4"), {}), 14.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("2^3^2"), {}), 512.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("-x^2"), {{"x", 3.0}}), -9.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("x/2/4"), {{"x", 8.0}}), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("2^-1"), {}), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(parse("1.5e1 - 5"), {}), 10.0);
}

TEST(Parse, ErrorsCarryPositions) {
  try {
    parse("x + * y");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  EXPECT_THROW(parse("sin x"), ParseError);
  EXPECT_THROW(parse("(x + 1"), ParseError);
  EXPECT_THROW(parse("foo(x)"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("sin(x, y)"), ParseError);
}

TEST(Parse, OpaqueFunctionsAndDerivatives) {
  Context c = Context::standard();
  Expr f = parse("F_u", c);
  ASSERT_EQ(f.kind(), Kind::Apply);
  EXPECT_EQ(f.name(), "F");
  EXPECT_EQ(f.orders()[0], 1);
  EXPECT_EQ(parse("F''", c), parse("F_uu", c));
  EXPECT_EQ(parse("F(u)", c), parse("F", c));
  EXPECT_THROW(parse("F_x", c), ParseError);
}

TEST(Parse, JetNamesAreSymmetric) {
  Context c;
  c.jets = JetSpace({"x", "t"}, {"u"}, 2);
  Expr a = parse("u_xt", c), b = parse("u_tx", c);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.is_jet());
  EXPECT_EQ(a.jet_order(), 2);
}

TEST(Simplify, CanonicalForms) {
  EXPECT_TRUE(parse("x - x").is_zero());
  EXPECT_EQ(parse("2*x + 3*x"), parse("5*x"));
  EXPECT_EQ(parse("x*x*y"), parse("y*x^2"));
  EXPECT_EQ(parse("1/3 + 1/6"), Expr(Number::rational(1, 2)));
  EXPECT_EQ(parse("x + y"), parse("y + x"));
  EXPECT_EQ(parse("(x^2)^3"), parse("x^6"));
}

TEST(Simplify, ExpandDistributes) {
  Expr e = expand(parse("(x + y)^2 - x^2 - 2*x*y - y^2"));
  EXPECT_TRUE(e.is_zero()) << e;
}

TEST(Simplify, RationalArithmeticStaysExact) {
  Expr e = parse("1/7 + 2/7");
  ASSERT_TRUE(e.is_number());
  EXPECT_TRUE(e.number().exact());
  EXPECT_EQ(e.number().numerator(), 3);
  EXPECT_EQ(e.number().denominator(), 7);
}

TEST(Property, PrintedFormRoundTrips) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    Expr e = simplify(random_expr(rng, 3));
    Expr back = parse(e.str());
    EXPECT_EQ(back, e) << e.str() << " reparsed as " << back.str();
  }
}

TEST(Property, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Expr e = random_expr(rng, 3);
    Expr d = diff(e, "x");
    double x = u(rng), y = u(rng), h = 1e-5;
    double fd = (at(e, x + h, y) - at(e, x - h, y)) / (2 * h);
    double ex = at(d, x, y);
    EXPECT_NEAR(ex, fd, 1e-5 * std::max(1.0, std::abs(fd))) << e;
  }
}

TEST(Property, CompiledMatchesTreeEvaluation) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Expr e = random_expr(rng, 4);
    CompiledExpr c(e, {"x", "y"});
    double v[2] = {u(rng), u(rng)};
    EXPECT_NEAR(c(v), at(e, v[0], v[1]), 1e-12 * std::max(1.0, std::abs(c(v))));
  }
}

TEST(Property, DifferentiationIsLinear) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    Expr a = random_expr(rng, 3), b = random_expr(rng, 3);
    Expr lhs = diff(Expr(2) * a - Expr(3) * b, "y");
    Expr rhs = Expr(2) * diff(a, "y") - Expr(3) * diff(b, "y");
    SamplingComparison c = compare_by_sampling(lhs, rhs, 20, 1, 1e-10);
    EXPECT_TRUE(c.equivalent) << a << " ; " << b;
  }
}

TEST(Calculus, KnownDerivatives) {
  EXPECT_EQ(diff(parse("sin(x)"), "x"), parse("cos(x)"));
  SamplingComparison c = compare_by_sampling(diff(parse("artanh(x)"), "x"), parse("1/(1 - x^2)"), 50, 2, 1e-12);
  EXPECT_TRUE(c.equivalent);
  c = compare_by_sampling(diff(parse("arsinh(x)"), "x"), parse("1/sqrt(1 + x^2)"), 50, 2, 1e-12);
  EXPECT_TRUE(c.equivalent);
  EXPECT_THROW(diff(parse("abs(x)"), "x"), DomainError);
}

TEST(Calculus, TotalDerivative) {
  JetSpace j({"x", "t"}, {"u"}, 2);
  Context c;
  c.jets = j;
  EXPECT_EQ(total_derivative(parse("u^2", c), 0, j), parse("2*u*u_x", c));
  EXPECT_EQ(total_derivative(parse("x*u_t", c), 0, j), parse("u_t + x*u_xt", c));
  EXPECT_THROW(total_derivative(parse("u_xx", c), 1, j), JetOrderError);
}

TEST(Calculus, SubstitutionRules) {
  Expr e = substitute(parse("x^2"), {{"x", parse("y + 1")}});
  EXPECT_TRUE(compare_by_sampling(e, parse("y^2 + 2*y + 1"), 20, 1, 1e-12).equivalent);
  EXPECT_EQ(substitute(parse("u"), {{"u", parse("tanh(u)")}}), parse("tanh(u)"));
  EXPECT_THROW(substitute(parse("x + y"), {{"x", parse("y")}, {"y", parse("x")}}), InputError);
  EXPECT_EQ(change_variables(parse("x - 2*y"), {{"x", parse("y")}, {"y", parse("x")}}), parse("y - 2*x"));
}

TEST(Calculus, InstantiateOpaqueFunction) {
  Context c = Context::standard();
  Expr e = instantiate(parse("F_u*F", c), "F", {"u"}, parse("tanh(u)"));
  EXPECT_TRUE(compare_by_sampling(e, parse("(1 - tanh(u)^2)*tanh(u)"), 20, 1, 1e-12).equivalent);
}

TEST(Evaluate, DomainAndBindingErrors) {
  EXPECT_THROW(evaluate(parse("log(x)"), {{"x", -1.0}}), DomainError);
  EXPECT_THROW(evaluate(parse("artanh(x)"), {{"x", 1.0}}), DomainError);
  EXPECT_THROW(evaluate(parse("x + y"), {{"x", 1.0}}), UnboundVariableError);
  EXPECT_THROW(evaluate(parse("exp(x)"), {{"x", 1e4}}), DomainError);
  EXPECT_DOUBLE_EQ(evaluate(parse("sign(x)*abs(x)"), {{"x", -2.5}}), -2.5);
}

TEST(Evaluate, RegistryDefinitions) {
  FunctionRegistry reg;
  reg.define("F", {"u"}, parse("u^3"));
  Context c = Context::standard();
  EXPECT_DOUBLE_EQ(evaluate(parse("F_uu", c), {{"u", 2.0}}, &reg), 12.0);
  EXPECT_THROW(evaluate(parse("G", c), {{"u", 2.0}}, &reg), UnboundVariableError);
}

TEST(Evaluate, SamplingComparisonUpToFactor) {
  Context c = Context::standard();
  SamplingComparison s = compare_by_sampling(parse("2*F*G_u", c), parse("G_u*F", c), 30, 4, 1e-12, true);
  EXPECT_TRUE(s.equivalent);
  EXPECT_NEAR(s.factor, 2.0, 1e-12);
  EXPECT_FALSE(compare_by_sampling(parse("F", c), parse("G", c), 30, 4, 1e-8).equivalent);
}

TEST(Collect, JetPolynomialTerms) {
  Context c;
  c.jets = JetSpace({"x", "t"}, {"u"}, 1);
  JetPolynomial p = collect_jets(expand(parse("(u_x + u_t)^2 + u*u_x + 3", c)));
  EXPECT_TRUE(p.polynomial);
  EXPECT_EQ(p.terms.size(), 5u);  // 1, u_x, u_x^2, u_x u_t, u_t^2
  JetPolynomial q = collect_jets(parse("sin(u_x)", c));
  EXPECT_FALSE(q.polynomial);
}
