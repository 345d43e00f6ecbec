#include <vector>

#include <benchmark/benchmark.h>

#include "genlie/assoc.hpp"
#include "genlie/eval.hpp"
#include "genlie/genfunc.hpp"
#include "genlie/group_action.hpp"
#include "genlie/mollifier.hpp"
#include "genlie/parse.hpp"
#include "genlie/system.hpp"
#include "genlie/vector_field.hpp"

using namespace genlie;

namespace {

Context jet_context(int order) {
  Context c = Context::standard();
  c.jets = JetSpace({"x", "t"}, {"u"}, order);
  return c;
}

void BM_ParseSimplify(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(parse("(x + 2*y)^3 - sin(x*y)/(1 + x^2) + exp(-y)*x*x"));
}
BENCHMARK(BM_ParseSimplify);

void BM_CompiledEval(benchmark::State& s) {
  CompiledExpr f(parse("(x + 2*y)^3 - sin(x*y)/(1 + x^2) + exp(-y)*x*x"), {"x", "y"});
  std::vector<double> v{0.3, -0.2};
  for (auto _ : s) {
    v[0] += 1e-9;
    benchmark::DoNotOptimize(f(v));
  }
}
BENCHMARK(BM_CompiledEval);

void BM_ProlongBoost(benchmark::State& s) {
  Context c = jet_context(static_cast<int>(s.range(0)));
  VectorField v(*c.jets, {parse("-t", c), parse("-x", c)}, {parse("u^2 - 1", c)});
  for (auto _ : s) benchmark::DoNotOptimize(prolong(v, static_cast<int>(s.range(0))));
}
BENCHMARK(BM_ProlongBoost)->Arg(1)->Arg(2)->Arg(3);

void BM_DeterminingTransport(benchmark::State& s) {
  Context c = jet_context(1);
  c.declare({"phi", {"u"}, ""});
  DifferentialSystem sys(*c.jets, {parse("u_t + u*u_x", c)});
  sys.solve_for(0, parse("u_t", c));
  VectorField ansatz(*c.jets, {Expr(0), Expr(0)}, {parse("phi", c)});
  for (auto _ : s) benchmark::DoNotOptimize(determining_equations(sys, ansatz));
}
BENCHMARK(BM_DeterminingTransport);

void BM_WeakPairingDeltaPrime(benchmark::State& s) {
  GenFunc d = embed_delta_derivative(1, Mollifier::bump());
  TestFunction psi = bump_test_function({"x"}, {0.1}, {0.5}, {0.3});
  double eps = 1.0 / static_cast<double>(s.range(0));
  for (auto _ : s) benchmark::DoNotOptimize(weak_pairing(d, psi, eps));
}
BENCHMARK(BM_WeakPairingDeltaPrime)->Arg(10)->Arg(1000)->Arg(10000);

void BM_NumericFlow(benchmark::State& s) {
  Context c = jet_context(1);
  GroupAction g = flow(VectorField(*c.jets, {Expr(0), Expr(0)}, {parse("sin(u)", c)}));
  double x[2] = {0, 0}, u[1] = {0.7}, xo[2], uo[1];
  for (auto _ : s) {
    g.apply(1.3, x, u, 0.1, xo, uo);
    benchmark::DoNotOptimize(uo[0]);
  }
}
BENCHMARK(BM_NumericFlow);

}  // namespace

BENCHMARK_MAIN();
