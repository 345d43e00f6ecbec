#include "genlie/genfunc.hpp"

#include <cmath>
#include <limits>

#include "genlie/calculus.hpp"
#include "genlie/error.hpp"
#include "genlie/quadrature.hpp"
#include "genlie/simplify.hpp"

namespace genlie {

bool Box::contains(const Box& other) const {
  if (other.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (other.ranges[i].first < ranges[i].first || other.ranges[i].second > ranges[i].second) {
      return false;
    }
  }
  return true;
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < ranges[i].first || x[i] > ranges[i].second) return false;
  return true;
}

const char* growth_class_name(GrowthClass c) {
  switch (c) {
    case GrowthClass::Local:
      return "G";
    case GrowthClass::Tempered:
      return "G_tau";
    case GrowthClass::Mixed:
      return "G_tau_mixed";
  }
  return "?";
}

double EpsLadder::operator[](std::size_t k) const {
  return eps0 * std::pow(ratio, static_cast<double>(k));
}

std::vector<double> EpsLadder::values() const {
  std::vector<double> v;
  for (std::size_t k = 0; k < size(); ++k) v.push_back((*this)[k]);
  return v;
}

// ---------------------------------------------------------------------------
// Smooth maps

SmoothMap::SmoothMap(std::string name, Fn f, int exact_orders, bool slowly_increasing)
    : name_(std::move(name)),
      f_(std::move(f)),
      exact_orders_(exact_orders),
      slowly_increasing_(slowly_increasing) {}

double SmoothMap::derivative(int k, double y, double eps) const {
  if (k <= exact_orders_) return f_(y, eps, k);
  double h = 1e-4 * (std::isfinite(eps) ? std::min(1.0, eps) : 1.0);
  return (derivative(k - 1, y + h, eps) - derivative(k - 1, y - h, eps)) / (2 * h);
}

SmoothMap SmoothMap::identity() {
  return SmoothMap("id", [](double y, double, int k) { return k == 0 ? y : (k == 1 ? 1.0 : 0.0); },
                   1 << 20);
}

SmoothMap SmoothMap::tanh_map() {
  // d^k tanh = P_k(T) with P_{k+1} = P_k'(T) (1 - T^2).
  auto polys = std::make_shared<std::vector<std::vector<double>>>();
  polys->push_back({0.0, 1.0});
  for (int k = 1; k <= 8; ++k) {
    const auto& p = polys->back();
    std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = static_cast<double>(i) * p[i];
    std::vector<double> next(dp.size() + 2, 0.0);
    for (std::size_t i = 0; i < dp.size(); ++i) {
      next[i] += dp[i];
      next[i + 2] -= dp[i];
    }
    polys->push_back(next);
  }
  return SmoothMap(
      "tanh",
      [polys](double y, double, int k) {
        double t = std::tanh(y);
        const auto& p = (*polys)[static_cast<std::size_t>(k)];
        double r = 0.0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * t + *it;
        return r;
      },
      8);
}

SmoothMap SmoothMap::sin_map() {
  return SmoothMap("sin", [](double y, double, int k) { return std::sin(y + k * M_PI / 2); },
                   1 << 20);
}

double arsinh_scaled_sinh(double a, double y) {
  if (y == 0.0) return 0.0;
  double ay = std::fabs(y);
  double sign = y > 0 ? 1.0 : -1.0;
  double log_sinh = ay < 1.0 ? std::log(std::sinh(ay)) : ay + std::log1p(-std::exp(-2 * ay)) - M_LN2;
  double l = a + log_sinh;
  if (l < 30.0) return sign * std::asinh(std::exp(l));
  return sign * (l + std::log1p(std::sqrt(1.0 + std::exp(-2 * l))));
}

namespace {

// d/dy arsinh(e^a sinh y) and its second derivative in sech/tanh form.
double ass_d1(double a, double y) {
  double ia2 = std::exp(-2 * a);
  double t = std::tanh(y);
  double sech2 = 1.0 - t * t;
  return 1.0 / std::sqrt(ia2 * sech2 + t * t);
}

double ass_d2(double a, double y) {
  double ia2 = std::exp(-2 * a);
  double t = std::tanh(y);
  double sech2 = 1.0 - t * t;
  double den = ia2 * sech2 + t * t;
  double sigma = t / std::sqrt(den);
  return (ia2 - 1.0) * sech2 / den * sigma;
}

}  // namespace

SmoothMap SmoothMap::arsinh_scaled_sinh(double a) {
  return SmoothMap(
      "arsinh(exp(" + Number::real(a).to_string() + ")*sinh(y))",
      [a](double y, double, int k) {
        if (k == 0) return genlie::arsinh_scaled_sinh(a, y);
        if (k == 1) return ass_d1(a, y);
        return ass_d2(a, y);
      },
      2);
}

SmoothMap SmoothMap::eps_arsinh_scaled_sinh(double eta) {
  return SmoothMap(
      "eps*arsinh(exp(" + Number::real(eta).to_string() + "/eps)*sinh(y/eps))",
      [eta](double y, double eps, int k) {
        double a = eta / eps;
        if (k == 0) return eps * genlie::arsinh_scaled_sinh(a, y / eps);
        if (k == 1) return ass_d1(a, y / eps);
        return ass_d2(a, y / eps) / eps;
      },
      2);
}

SmoothMap SmoothMap::from_expr(const Expr& e, std::string name) {
  auto compiled = std::make_shared<std::vector<CompiledExpr>>();
  Expr d = e;
  for (int k = 0; k <= 4; ++k) {
    compiled->emplace_back(d, std::vector<std::string>{"y", "eps"});
    d = diff(d, "y");
  }
  if (name.empty()) name = e.str();
  return SmoothMap(
      name,
      [compiled](double y, double eps, int k) {
        double v[2] = {y, eps};
        return (*compiled)[static_cast<std::size_t>(k)](v);
      },
      4, !contains_nonsmooth(e));
}

// ---------------------------------------------------------------------------
// GenFunc

GenFunc::GenFunc(std::size_t arity, Evaluator f, Box domain, GrowthClass cls, std::string provenance)
    : arity_(arity),
      f_(std::move(f)),
      domain_(std::move(domain)),
      class_(cls),
      provenance_(std::move(provenance)) {
  if (domain_.dim() != arity_) throw InputError("GenFunc: domain dimension differs from arity");
}

GenFunc GenFunc::from_expr(const Expr& e, std::vector<std::string> variables, Box domain,
                           GrowthClass cls, std::shared_ptr<const FunctionRegistry> registry,
                           std::string provenance) {
  if (contains_nonsmooth(e)) {
    throw ClassViolation("representative expression '" + e.str() + "' is not smooth");
  }
  std::vector<std::string> slots = variables;
  slots.push_back("eps");
  auto compiled = std::make_shared<CompiledExpr>(e, slots, registry.get());
  std::size_t n = variables.size();
  GenFunc g(
      n,
      [compiled, n](std::span<const double> x, double eps) {
        double buf[8];
        std::vector<double> heap;
        double* v = buf;
        if (n + 1 > 8) {
          heap.resize(n + 1);
          v = heap.data();
        }
        for (std::size_t i = 0; i < n; ++i) v[i] = x[i];
        v[n] = eps;
        return (*compiled)(std::span<const double>(v, n + 1));
      },
      std::move(domain), cls, provenance.empty() ? e.str() : std::move(provenance));
  g.expr_ = e;
  g.variables_ = std::move(variables);
  g.registry_ = std::move(registry);
  return g;
}

GenFunc GenFunc::constant(double c, Box domain) {
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < domain.dim(); ++i) vars.push_back("x" + std::to_string(i));
  return from_expr(Expr(Number::real(c)), vars, std::move(domain), GrowthClass::Tempered, nullptr,
                   "constant");
}

GenFunc GenFunc::eps_power(double p, double coeff, Box domain) {
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < domain.dim(); ++i) vars.push_back("x" + std::to_string(i));
  Expr e = simplify(Expr(Number::real(coeff)) * power(symbol("eps"), Expr(Number::real(p))));
  return from_expr(e, vars, std::move(domain), GrowthClass::Tempered, nullptr, "eps power");
}

double GenFunc::operator()(double x, double eps) const {
  double v[1] = {x};
  return f_(v, eps);
}

double GenFunc::operator()(double x, double t, double eps) const {
  double v[2] = {x, t};
  return f_(v, eps);
}

GenFunc GenFunc::partial(std::size_t var, int times) const {
  if (var >= arity_) throw InputError("partial: variable index out of range");
  GenFunc out = *this;
  for (int k = 0; k < times; ++k) {
    if (out.expr_) {
      out = from_expr(simplify(diff(*out.expr_, out.variables_[var])), out.variables_, out.domain_,
                      out.class_, out.registry_, "d(" + out.provenance_ + ")");
      out.loci_ = loci_;
      continue;
    }
    if (out.partial_) {
      out = out.partial_(var);
      continue;
    }
    GenFunc base = out;
    std::size_t n = arity_;
    GenFunc d(
        n,
        [base, var, n](std::span<const double> x, double eps) {
          double h = eps / 8.0;
          std::vector<double> y(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
          double x0 = y[var];
          auto at = [&](double s) {
            y[var] = x0 + s * h;
            return base(y, eps);
          };
          return (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
        },
        domain_, class_, "fd(" + out.provenance_ + ")");
    d.loci_ = loci_;
    out = d;
  }
  return out;
}

GenFunc GenFunc::partial(const std::vector<int>& alpha) const {
  GenFunc out = *this;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] > 0) out = out.partial(i, alpha[i]);
  return out;
}

GenFunc GenFunc::with_loci(std::vector<Hyperplane> loci) const {
  GenFunc g = *this;
  g.loci_ = std::move(loci);
  return g;
}

GenFunc GenFunc::with_partial(Partial p) const {
  GenFunc g = *this;
  g.partial_ = std::move(p);
  return g;
}

GenFunc GenFunc::with_provenance(std::string note) const {
  GenFunc g = *this;
  g.provenance_ = std::move(note);
  return g;
}

GenFunc GenFunc::with_class(GrowthClass cls) const {
  GenFunc g = *this;
  g.class_ = cls;
  return g;
}

GenFunc GenFunc::with_domain(Box domain) const {
  if (domain.dim() != arity_) throw InputError("GenFunc: domain dimension differs from arity");
  GenFunc g = *this;
  g.domain_ = std::move(domain);
  return g;
}

// ---------------------------------------------------------------------------
// Algebra

namespace {

void check_compatible(const GenFunc& f, const GenFunc& g, const char* op) {
  if (f.arity() != g.arity()) throw InputError(std::string(op) + ": arity mismatch");
}

GrowthClass combine(GrowthClass a, GrowthClass b) { return a == b ? a : GrowthClass::Local; }

std::vector<Hyperplane> union_loci(const GenFunc& f, const GenFunc& g) {
  std::vector<Hyperplane> l = f.loci();
  l.insert(l.end(), g.loci().begin(), g.loci().end());
  return l;
}

bool same_backing(const GenFunc& f, const GenFunc& g) {
  return f.expr() && g.expr() && f.variables() == g.variables();
}

}  // namespace

GenFunc add(const GenFunc& f, const GenFunc& g) {
  check_compatible(f, g, "add");
  if (same_backing(f, g) && (!f.registry_ || !g.registry_ || f.registry_ == g.registry_)) {
    auto reg = f.registry_ ? f.registry_ : g.registry_;
    return GenFunc::from_expr(simplify(*f.expr() + *g.expr()), f.variables(), f.domain(),
                              combine(f.growth(), g.growth()), reg,
                              "(" + f.provenance() + ")+(" + g.provenance() + ")")
        .with_loci(union_loci(f, g));
  }
  GenFunc out(
      f.arity(), [f, g](std::span<const double> x, double eps) { return f(x, eps) + g(x, eps); },
      f.domain(), combine(f.growth(), g.growth()),
      "(" + f.provenance() + ")+(" + g.provenance() + ")");
  return out.with_loci(union_loci(f, g)).with_partial([f, g](std::size_t v) {
    return add(f.partial(v), g.partial(v));
  });
}

GenFunc scale(const GenFunc& f, double c) {
  if (f.expr()) {
    return GenFunc::from_expr(simplify(Expr(Number::real(c)) * *f.expr()), f.variables(),
                              f.domain(), f.growth(), f.registry_,
                              Number::real(c).to_string() + "*(" + f.provenance() + ")")
        .with_loci(f.loci());
  }
  GenFunc out(
      f.arity(), [f, c](std::span<const double> x, double eps) { return c * f(x, eps); }, f.domain(),
      f.growth(), Number::real(c).to_string() + "*(" + f.provenance() + ")");
  return out.with_loci(f.loci()).with_partial([f, c](std::size_t v) {
    return scale(f.partial(v), c);
  });
}

GenFunc sub(const GenFunc& f, const GenFunc& g) { return add(f, scale(g, -1.0)); }

GenFunc mul(const GenFunc& f, const GenFunc& g) {
  check_compatible(f, g, "mul");
  if (same_backing(f, g) && (!f.registry_ || !g.registry_ || f.registry_ == g.registry_)) {
    auto reg = f.registry_ ? f.registry_ : g.registry_;
    return GenFunc::from_expr(simplify(*f.expr() * *g.expr()), f.variables(), f.domain(),
                              combine(f.growth(), g.growth()), reg,
                              "(" + f.provenance() + ")*(" + g.provenance() + ")")
        .with_loci(union_loci(f, g));
  }
  GenFunc out(
      f.arity(), [f, g](std::span<const double> x, double eps) { return f(x, eps) * g(x, eps); },
      f.domain(), combine(f.growth(), g.growth()),
      "(" + f.provenance() + ")*(" + g.provenance() + ")");
  return out.with_loci(union_loci(f, g)).with_partial([f, g](std::size_t v) {
    return add(mul(f.partial(v), g), mul(f, g.partial(v)));
  });
}

GenFunc derive(const GenFunc& f, std::size_t var) { return f.partial(var); }

GenFunc power(const GenFunc& f, int k) {
  if (k < 1) throw InputError("power: exponent must be positive");
  GenFunc out = f;
  for (int i = 1; i < k; ++i) out = mul(out, f);
  return out;
}

namespace {

SmoothMap shifted(const SmoothMap& m) {
  return SmoothMap(
      m.name() + "'", [m](double y, double eps, int k) { return m.derivative(k + 1, y, eps); },
      1 << 20, true);
}

}  // namespace

GenFunc compose(const SmoothMap& m, const GenFunc& g) {
  if (!m.slowly_increasing()) {
    throw ClassViolation("compose: '" + m.name() + "' is not slowly increasing");
  }
  GenFunc out(
      g.arity(), [m, g](std::span<const double> x, double eps) { return m(g(x, eps), eps); },
      g.domain(), g.growth(), m.name() + "(" + g.provenance() + ")");
  return out.with_loci(g.loci()).with_partial([m, g](std::size_t v) {
    return mul(compose(shifted(m), g), g.partial(v));
  });
}

GenFunc compose(const GenFunc& f, const GenFunc& g) {
  if (f.arity() != 1) throw InputError("compose: outer function must have one variable");
  if (f.growth() != GrowthClass::Tempered) {
    throw ClassViolation("compose: outer representative '" + f.provenance() + "' is not tempered");
  }
  GenFunc out(
      g.arity(),
      [f, g](std::span<const double> x, double eps) {
        double y[1] = {g(x, eps)};
        return f(y, eps);
      },
      g.domain(), g.growth(), f.provenance() + "(" + g.provenance() + ")");
  return out.with_loci(g.loci()).with_partial([f, g](std::size_t v) {
    return mul(compose(f.partial(0), g), g.partial(v));
  });
}

GenFunc pullback_linear(const GenFunc& f, std::vector<double> coeffs, double offset, Box domain) {
  if (f.arity() != 1) throw InputError("pullback_linear: needs a one-variable family");
  if (coeffs.size() != domain.dim()) throw InputError("pullback_linear: coefficient count");
  std::vector<Hyperplane> loci;
  for (const auto& h : f.loci()) {
    Hyperplane p;
    for (double c : coeffs) p.normal.push_back(h.normal[0] * c);
    p.offset = h.offset - h.normal[0] * offset;
    loci.push_back(p);
  }
  GenFunc out(
      coeffs.size(),
      [f, coeffs, offset](std::span<const double> x, double eps) {
        double s = offset;
        for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * x[i];
        double y[1] = {s};
        return f(y, eps);
      },
      domain, f.growth(), f.provenance() + " o linear");
  return out.with_loci(loci).with_partial([f, coeffs, offset, domain](std::size_t v) {
    return scale(pullback_linear(f.partial(0), coeffs, offset, domain), coeffs[v]);
  });
}

GenFunc extend_constant(const GenFunc& f, Box domain) {
  std::size_t n = f.arity();
  if (domain.dim() < n) throw InputError("extend_constant: target dimension too small");
  std::vector<Hyperplane> loci;
  for (auto h : f.loci()) {
    h.normal.resize(domain.dim(), 0.0);
    loci.push_back(h);
  }
  GenFunc out(
      domain.dim(),
      [f, n](std::span<const double> x, double eps) { return f(x.subspan(0, n), eps); }, domain,
      f.growth(), f.provenance());
  return out.with_loci(loci).with_partial([f, n, domain](std::size_t v) {
    if (v >= n) return GenFunc::constant(0.0, domain);
    return extend_constant(f.partial(v), domain);
  });
}

// ---------------------------------------------------------------------------
// Embeddings

GenFunc embed_delta_derivative(int i, const Mollifier& rho, Box domain) {
  if (i < 0) throw InputError("delta derivative order must be nonnegative");
  GenFunc out(
      1, [rho, i](std::span<const double> x, double eps) { return rho.scaled(i, x[0], eps); },
      domain, GrowthClass::Tempered, "delta^(" + std::to_string(i) + ")[" + rho.name() + "]");
  return out.with_loci({Hyperplane{{1.0}, 0.0}}).with_partial([rho, i, domain](std::size_t) {
    return embed_delta_derivative(i + 1, rho, domain);
  });
}

GenFunc embed_heaviside(const Mollifier& rho, Box domain) {
  auto cdf = std::make_shared<const BumpCdf>(rho);
  GenFunc out(
      1, [cdf](std::span<const double> x, double eps) { return (*cdf)(x[0] / eps); }, domain,
      GrowthClass::Tempered, "H[" + rho.name() + "]");
  return out.with_loci({Hyperplane{{1.0}, 0.0}}).with_partial([rho, domain](std::size_t) {
    return embed_delta_derivative(0, rho, domain);
  });
}

GenFunc embed_smooth(const Expr& phi, const Mollifier& rho, Box domain) {
  auto compiled = std::make_shared<CompiledExpr>(phi, std::vector<std::string>{"x"});
  const GaussRule& g = gauss_legendre(32);
  double r = rho.radius();
  const int panels = rho.support() == Support::Compact ? 4 : 12;
  std::vector<double> ys, ws;
  for (int p = 0; p < panels; ++p) {
    double a = -r + 2 * r * p / panels;
    double b = -r + 2 * r * (p + 1) / panels;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      double y = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[j];
      ys.push_back(y);
      ws.push_back(0.5 * (b - a) * g.weights[j] * rho(y));
    }
  }
  auto nodes = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(ys, ws);
  GenFunc out(
      1,
      [compiled, nodes](std::span<const double> x, double eps) {
        double s = 0.0;
        const auto& [yy, ww] = *nodes;
        for (std::size_t j = 0; j < yy.size(); ++j) {
          double v[1] = {x[0] - eps * yy[j]};
          s += ww[j] * (*compiled)(v);
        }
        return s;
      },
      domain, GrowthClass::Local, "iota(" + phi.str() + ")[" + rho.name() + "]");
  return out.with_partial([phi, rho, domain](std::size_t) {
    return embed_smooth(simplify(diff(phi, "x")), rho, domain);
  });
}

// ---------------------------------------------------------------------------

GeneralizedNumber point_value(const GenFunc& f, const GeneralizedPoint& x, const EpsLadder& ladder) {
  GeneralizedNumber out;
  for (double eps : ladder.values()) {
    std::vector<double> p = x.at(eps);
    if (!f.domain().contains(p)) {
      throw DomainError("generalized point leaves the domain at eps = " + Number::real(eps).to_string());
    }
    out.eps.push_back(eps);
    out.values.push_back(f(p, eps));
  }
  return out;
}

GeneralizedNumber difference(const GeneralizedNumber& a, const GeneralizedNumber& b) {
  if (a.eps.size() != b.eps.size()) throw InputError("generalized numbers on different ladders");
  GeneralizedNumber d = a;
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
  return d;
}

}  // namespace genlie
