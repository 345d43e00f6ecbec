#include <algorithm>
#include <chrono>
#include <cmath>

#include "genlie/error.hpp"
#include "genlie/scenarios.hpp"

namespace genlie {

const char* expected_source_name(ExpectedSource s) {
  switch (s) {
    case ExpectedSource::Published: return "published";
    case ExpectedSource::Oracle: return "oracle";
    case ExpectedSource::Exact: return "exact";
  }
  return "?";
}

Verdict& ScenarioReport::add(Verdict v) {
  verdicts.push_back(std::move(v));
  return verdicts.back();
}

void ScenarioReport::finish() {
  pass = !verdicts.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

ScenarioReport Scenario::run(const ScenarioConfig& config) const {
  if (!runner) throw InputError("scenario '" + name + "' has no runner");
  auto start = std::chrono::steady_clock::now();
  ScenarioReport r = runner(*this, config);
  r.name = name;
  r.parameters = parameters;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.finish();
  return r;
}

GenFunc residual_function(const DifferentialSystem& sys, std::size_t equation, JetEvaluator jets,
                          Box domain, std::shared_ptr<const FunctionRegistry> registry) {
  if (equation >= sys.size()) throw InputError("equation index out of range");
  std::vector<std::string> names;
  for (const Expr& z : sys.jets().coordinates(sys.order())) names.push_back(z.name());
  names.push_back("eps");
  auto compiled = std::make_shared<const CompiledExpr>(sys.equations()[equation], names, registry.get());
  const std::size_t n = names.size() - 1;
  const std::size_t p = sys.jets().p();
  GenFunc::Evaluator ev = [compiled, jets = std::move(jets), n, registry](std::span<const double> x,
                                                                         double eps) {
    std::vector<double> z = jets(x, eps);
    if (z.size() != n) throw InputError("jet evaluator returned the wrong number of coordinates");
    z.push_back(eps);
    return (*compiled)(z);
  };
  return GenFunc(p, ev, std::move(domain), GrowthClass::Local, "residual of equation " + std::to_string(equation + 1));
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kStepStart = 0.25;

double hstep(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double hstep_prime(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

// Smooth step from 0 (r <= 1/4) to 1 (r >= 1) and its derivative.
double step(double r) {
  double a = hstep(r - kStepStart), b = hstep(1.0 - r);
  return a / (a + b);
}
double step_prime(double r) {
  double a = hstep(r - kStepStart), b = hstep(1.0 - r);
  double da = hstep_prime(r - kStepStart), db = -hstep_prime(1.0 - r);
  double s = a + b;
  return (da * b - a * db) / (s * s);
}

}  // namespace

double SignSqrt::value(double y) {
  double r = std::abs(y);
  double s = step(r);
  double mag = (1.0 - s) * r + s * std::sqrt(r);
  return y < 0 ? -mag : mag;
}

double SignSqrt::derivative(double y) {
  double r = std::abs(y);
  if (r <= kStepStart) return 1.0;
  if (r >= 1.0) return 0.5 / std::sqrt(r);
  double s = step(r), sq = std::sqrt(r);
  return (1.0 - s) + s * 0.5 / sq + step_prime(r) * (sq - r);
}

double SignSqrt::inverse(double w) {
  double r = std::abs(w);
  double out;
  if (r <= kStepStart) {
    out = r;
  } else if (r >= 1.0) {
    out = r * r;
  } else {
    // value is increasing on [1/4, 1] and maps it onto itself.
    double lo = kStepStart, hi = 1.0, y = r;
    for (int it = 0; it < 100; ++it) {
      double f = value(y) - r;
      if (f == 0.0) break;
      if (f > 0) hi = y; else lo = y;
      double next = y - f / derivative(y);
      next = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
      bool done = std::abs(next - y) <= 4e-16 * y || hi - lo <= 4e-16;
      y = next;
      if (done) break;
    }
    out = y;
  }
  return w < 0 ? -out : out;
}

// ---------------------------------------------------------------------------

HopfCharacteristics::HopfCharacteristics(HopfParams params, Mollifier rho)
    : params_(params), rho_(std::move(rho)), cdf_(std::make_shared<const BumpCdf>(rho_)) {
  if (rho_.support() != Support::Compact)
    throw InputError("Hopf data need a compactly supported mollifier");
  if (!(params_.u_l < params_.u_r)) throw InputError("rarefaction data need u_L < u_R");
}

double HopfCharacteristics::h(double x0, double eps) const { return (*cdf_)(x0 / eps); }

double HopfCharacteristics::foot(double x, double t, double eps) const {
  const double ul = params_.u_l, du = params_.u_r - params_.u_l;
  auto m = [&](double x0) { return x0 + t * (ul + du * h(x0, eps)); };
  auto mp = [&](double x0) { return 1.0 + t * du * rho_.scaled(0, x0, eps); };
  // Safeguarded Newton on an interval where m is increasing.
  auto solve = [&](double lo, double hi) {
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      double f = m(y) - x;
      if (f == 0.0) break;
      if (f > 0) hi = y; else lo = y;
      double d = mp(y);
      double next = d > 0 ? y - f / d : lo - 1.0;
      next = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
      double tol = 1e-15 * std::max(eps, std::abs(y));
      bool done = std::abs(next - y) <= tol || hi - lo <= tol;
      y = next;
      if (done) break;
    }
    return y;
  };
  const double peak = rho_(0.0) / eps;
  if (t >= 0.0 || -t * du * peak < 1.0) {
    double lo = std::min(x - t * ul, x - t * params_.u_r);
    double hi = std::max(x - t * ul, x - t * params_.u_r);
    return solve(lo - 1e-12, hi + 1e-12);
  }
  // Backward in time the map x0 -> m(x0) folds; it is increasing outside
  // (a, -a) with rho_eps(a) = 1/(|t| du).
  const double level = 1.0 / (-t * du) * eps;  // rho(z) at the fold
  double zlo = 0.0, zhi = 1.0;
  for (int it = 0; it < 80; ++it) {
    double z = 0.5 * (zlo + zhi);
    if (rho_(z) > level) zlo = z; else zhi = z;
  }
  const double a = -0.5 * (zlo + zhi) * eps, b = -a;
  if (x < m(b)) return solve(std::min(x - t * ul, a) - 1e-12, a);
  if (x > m(a)) return solve(b, std::max(x - t * params_.u_r, b) + 1e-12);
  throw DomainError("point lies where backward characteristics cross");
}

double HopfCharacteristics::u(double x, double t, double eps) const {
  return params_.u_l + (params_.u_r - params_.u_l) * h(foot(x, t, eps), eps);
}

double HopfCharacteristics::v(double x, double t, double eps) const {
  return params_.v_l + (params_.v_r - params_.v_l) * h(foot(x, t, eps), eps);
}

double hopf_ufan(const HopfParams& p, double x, double t) {
  if (x <= p.u_l * t) return p.u_l;
  if (x >= p.u_r * t) return p.u_r;
  return x / t;
}

double hopf_vfan(const HopfParams& p, double x, double t) {
  if (x <= p.u_l * t) return p.v_l;
  if (x >= p.u_r * t) return p.v_r;
  double du = p.u_r - p.u_l;
  return (p.v_r - p.v_l) / du * (x / t) + (p.v_l * p.u_r - p.v_r * p.u_l) / du;
}

std::vector<TestFunction> scenario_battery(std::vector<double> center, std::vector<double> radius) {
  const std::size_t n = center.size();
  if (n == 0 || n > 2 || radius.size() != n) throw InputError("battery needs matching 1D or 2D center and radius");
  std::vector<std::string> vars = n == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "t"};
  const double shift[3] = {0.0, 0.2, -0.25};
  const double tilt[3] = {0.0, 0.8, -0.6};
  std::vector<TestFunction> out;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> c = center, tl(n, 0.0);
    c[0] += shift[k] * radius[0];
    tl[0] = tilt[k] / radius[0];
    if (n == 2) tl[1] = 0.5 * tilt[k] / radius[1];
    out.push_back(bump_test_function(vars, c, radius, tl, "psi" + std::to_string(k + 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> scenario_names() {
  return {"hopf", "transport", "acoustics", "nonlind", "traffic", "dalembert"};
}

namespace {

struct ParamReader {
  std::map<std::string, double> values;
  std::string scenario;
  double take(const std::string& key, double fallback) {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    double v = it->second;
    values.erase(it);
    return v;
  }
  int take_int(const std::string& key, int fallback) {
    double v = take(key, fallback);
    if (v != std::floor(v)) throw InputError("parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
  }
  void done() const {
    if (!values.empty())
      throw InputError("unknown parameter '" + values.begin()->first + "' for scenario '" + scenario + "'");
  }
};

}  // namespace

Scenario make_scenario(const std::string& name, const std::map<std::string, double>& params) {
  ParamReader r{params, name};
  Scenario s;
  if (name == "hopf") {
    HopfParams p;
    p.u_l = r.take("u_l", p.u_l);
    p.u_r = r.take("u_r", p.u_r);
    p.v_l = r.take("v_l", p.v_l);
    p.v_r = r.take("v_r", p.v_r);
    p.eta = r.take("eta", p.eta);
    r.done();
    s = hopf_system_scenario(p);
  } else if (name == "transport") {
    TransportParams p;
    p.i = r.take_int("i", p.i);
    p.c = r.take("c", p.c);
    p.eta = r.take("eta", p.eta);
    r.done();
    s = transport_scenario(p);
  } else if (name == "acoustics") {
    AcousticsParams p;
    p.eta = r.take("eta", p.eta);
    p.theta = r.take("theta", p.theta);
    int nonlinear = r.take_int("nonlinear", 0);
    int delta = r.take_int("delta", 0);
    r.done();
    if (nonlinear) p.f = p.g = "signsqrt";
    if (delta) p.data = "delta";
    s = acoustics_scenario(p);
  } else if (name == "nonlind") {
    NonlindParams p;
    p.i = r.take_int("i", p.i);
    p.eta = r.take("eta", p.eta);
    p.lambda = r.take("lambda", p.lambda);
    r.done();
    s = nonlind_scenario(p);
  } else if (name == "traffic") {
    TrafficParams p;
    p.a = r.take("a", p.a);
    p.b = r.take("b", p.b);
    p.jump = r.take("jump", p.jump);
    p.u_star = r.take("u_star", p.u_star);
    p.u0 = r.take("u0", p.u0);
    p.eta = r.take("eta", p.eta);
    r.done();
    s = traffic_scenario(p);
  } else if (name == "dalembert") {
    DalembertParams p;
    p.eta = r.take("eta", p.eta);
    r.done();
    s = dalembert_hamilton_scenario(p);
  } else {
    throw InputError("unknown scenario '" + name + "'");
  }
  return s;
}

}  // namespace genlie
