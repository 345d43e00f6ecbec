#include "genlie/group_action.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "genlie/calculus.hpp"
#include "genlie/error.hpp"
#include "genlie/simplify.hpp"

namespace genlie {

namespace {

const Expr& eta_symbol() {
  static const Expr e = symbol("eta");
  return e;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

bool is_zero_expr(const Expr& e) { return simplify(expand(e)).is_zero(); }

std::string show(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Catalog pieces

struct Base {
  bool identity = false;
  Eigen::MatrixXd a;  // xi = A x
  std::vector<Expr> exprs;
};

std::optional<Base> match_linear_base(const VectorField& v) {
  const JetSpace& jets = v.jets();
  const std::size_t p = jets.p();
  Base b;
  b.a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  bool all_zero = true;
  for (std::size_t i = 0; i < p; ++i) {
    const Expr& xi = v.xi()[i];
    if (!xi.is_zero()) all_zero = false;
    std::vector<Expr> lin;
    for (std::size_t j = 0; j < p; ++j) {
      Expr d = simplify(diff(xi, jets.independent_symbol(j)));
      if (!d.is_number()) return std::nullopt;
      b.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d.number().value();
      lin.push_back(d * jets.independent_symbol(j));
    }
    if (!is_zero_expr(xi - add(lin))) return std::nullopt;
  }
  b.identity = all_zero;
  // exp(eta A) symbolically when A^2 is 0, I or -I, or A is diagonal.
  const Eigen::MatrixXd a2 = b.a * b.a;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(b.a.rows(), b.a.cols());
  std::function<Expr(std::size_t, std::size_t)> entry;
  const Expr& eta = eta_symbol();
  auto aij = [&](std::size_t i, std::size_t j) {
    double v = b.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (v == std::round(v) && std::abs(v) < 1e15)
      return Expr(Number(static_cast<std::int64_t>(v)));
    return Expr(Number::real(v));
  };
  auto delta = [](std::size_t i, std::size_t j) { return Expr(i == j ? 1 : 0); };
  bool diagonal = b.a.isDiagonal();
  if (diagonal) {
    entry = [&](std::size_t i, std::size_t j) {
      return i == j ? func(Fn::Exp, aij(i, i) * eta) : Expr(0);
    };
  } else if (a2.isZero()) {
    entry = [&](std::size_t i, std::size_t j) { return delta(i, j) + eta * aij(i, j); };
  } else if (a2.isApprox(id)) {
    entry = [&](std::size_t i, std::size_t j) {
      return delta(i, j) * func(Fn::Cosh, eta) + aij(i, j) * func(Fn::Sinh, eta);
    };
  } else if (a2.isApprox(-id)) {
    entry = [&](std::size_t i, std::size_t j) {
      return delta(i, j) * func(Fn::Cos, eta) + aij(i, j) * func(Fn::Sin, eta);
    };
  }
  if (entry) {
    for (std::size_t i = 0; i < p; ++i) {
      std::vector<Expr> terms;
      for (std::size_t j = 0; j < p; ++j) terms.push_back(entry(i, j) * jets.independent_symbol(j));
      b.exprs.push_back(simplify(add(terms)));
    }
  }
  return b;
}

struct Fibre {
  std::function<double(double eta, double u, double eps)> f;
  Expr expr;
};

// Extracts k from k * g or g, with g of the requested shape.
bool split_constant_factor(const Expr& e, const std::function<bool(const Expr&)>& is_core,
                           Number& k, Expr& core) {
  if (is_core(e)) {
    k = Number(1);
    core = e;
    return true;
  }
  if (e.kind() != Kind::Mul) return false;
  Number c(1);
  std::optional<Expr> found;
  for (const auto& f : e.args()) {
    if (f.is_number()) {
      c = c * f.number();
    } else if (!found && is_core(f)) {
      found = f;
    } else {
      return false;
    }
  }
  if (!found) return false;
  k = c;
  core = *found;
  return true;
}

std::optional<Fibre> match_fibre(const Expr& phi, const Expr& u, const FlowOptions& options) {
  const Expr& eta = eta_symbol();
  for (const auto& s : free_symbols(phi))
    if (s != u && s.name() != "eps") return std::nullopt;
  if (phi.is_zero()) return Fibre{[](double, double u0, double) { return u0; }, u};

  Expr d1 = simplify(diff(phi, u));
  Expr rest = simplify(expand(phi - d1 * u));
  if (d1.is_number() && rest.is_number()) {
    double a = d1.number().value(), b = rest.number().value();
    if (a == 0.0)
      return Fibre{[b](double t, double u0, double) { return u0 + b * t; }, simplify(u + rest * eta)};
    Expr e = simplify(u * func(Fn::Exp, d1 * eta) +
                      rest / d1 * (func(Fn::Exp, d1 * eta) - Expr(1)));
    return Fibre{[a, b](double t, double u0, double) {
                   double g = std::exp(a * t);
                   return u0 * g + b / a * std::expm1(a * t);
                 },
                 e};
  }

  // k (u^2 - 1)
  {
    Expr d2 = simplify(diff(phi, u, 2) / Expr(2));
    if (d2.is_number() && !d2.is_zero() && is_zero_expr(phi - d2 * (u * u - Expr(1)))) {
      double k = d2.number().value();
      Expr e = simplify(-func(Fn::Tanh, d2 * eta - func(Fn::Artanh, u)));
      return Fibre{[k](double t, double u0, double) {
                     if (!(std::abs(u0) < 1.0))
                       throw DomainError("tanh-type flow needs |u| < 1, got " + show(u0));
                     return -std::tanh(k * t - std::atanh(u0));
                   },
                   e};
    }
  }

  // k tanh(u / s), s constant or a function of eps
  {
    Number k;
    Expr core;
    auto is_tanh = [](const Expr& e) { return e.kind() == Kind::Func && e.fn() == Fn::Tanh; };
    if (split_constant_factor(phi, is_tanh, k, core)) {
      const Expr& arg = core.arg(0);
      Expr inv_s = simplify(diff(arg, u));
      if (!depends_on(inv_s, u.name()) && is_zero_expr(arg - inv_s * u)) {
        Expr s = simplify(Expr(1) / inv_s);
        auto compiled = std::make_shared<CompiledExpr>(s, std::vector<std::string>{"eps"});
        double kv = k.value();
        Expr e = simplify(s * func(Fn::Arsinh, func(Fn::Exp, Expr(k) * eta / s) *
                                                   func(Fn::Sinh, u / s)));
        return Fibre{[compiled, kv](double t, double u0, double eps) {
                       double ev[1] = {eps};
                       double sv = (*compiled)(ev);
                       double kk = kv;
                       if (sv < 0) {
                         sv = -sv;
                         kk = -kk;
                       }
                       if (!(sv > 0.0)) throw DomainError("tanh(u/s) flow with s = 0");
                       return sv * arsinh_scaled_sinh(kk * t / sv, u0 / sv);
                     },
                     e};
      }
    }
  }

  // c f(u) or c / F'(u) with a registered primitive
  for (const auto& prim : options.primitives) {
    Number c;
    Expr core;
    auto is_field = [&](const Expr& e) {
      return !prim.field.empty() && e.kind() == Kind::Apply && e.name() == prim.field &&
             e.args().size() == 1 && e.arg(0) == u &&
             std::all_of(e.orders().begin(), e.orders().end(), [](int o) { return o == 0; });
    };
    auto is_inv_derivative = [&](const Expr& e) {
      if (e.kind() != Kind::Pow || !(e.arg(1).is_number() && e.arg(1).number().is_minus_one()))
        return false;
      const Expr& b = e.arg(0);
      return b.kind() == Kind::Apply && b.name() == prim.antiderivative && b.args().size() == 1 &&
             b.arg(0) == u && b.orders().size() == 1 && b.orders()[0] == 1;
    };
    if (!split_constant_factor(phi, is_field, c, core) &&
        !split_constant_factor(phi, is_inv_derivative, c, core))
      continue;
    if (!options.registry)
      throw InputError("flow with primitive " + prim.antiderivative + " needs a function registry");
    std::vector<std::string> params{"u"};
    const int zero[1] = {0};
    const auto& fwd = options.registry->lookup(prim.antiderivative, zero);
    const auto& inv = options.registry->lookup(prim.inverse, zero);
    Expr f_u = apply(prim.antiderivative, params, {0}, {u}, prim.inverse);
    Expr e = apply(prim.inverse, params, {0}, {Expr(c) * eta + f_u}, prim.antiderivative);
    double cv = c.value();
    auto reg = options.registry;
    return Fibre{[fwd, inv, cv, reg](double t, double u0, double eps) {
                   double a[1] = {u0};
                   double b[1] = {cv * t + fwd(a, eps)};
                   return inv(b, eps);
                 },
                 e};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Numeric flows

struct NumericFlow {
  std::vector<CompiledExpr> rhs;  // xi then phi over (x, u, eps)
  std::size_t p = 0, q = 0;
  FlowOptions options;

  void eval(const std::vector<double>& y, double eps, std::size_t n, std::vector<double>& out,
            std::vector<double>& scratch) const {
    scratch.assign(y.begin(), y.end());
    scratch.resize(p + q);
    scratch.push_back(eps);
    for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i](scratch);
  }

  // Integrates the first n components (n = p for the base alone).
  std::vector<double> run(std::vector<double> y0, double eta, double eps, std::size_t n,
                          int steps) const {
    std::vector<double> y = std::move(y0), k1(n), k2(n), k3(n), k4(n), tmp(n), scratch;
    const double h = eta / steps;
    for (int s = 0; s < steps; ++s) {
      eval(y, eps, n, k1, scratch);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
      eval(tmp, eps, n, k2, scratch);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
      eval(tmp, eps, n, k3, scratch);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
      eval(tmp, eps, n, k4, scratch);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (!std::isfinite(y[i]) || std::abs(y[i]) > 1e150)
          throw ComputationError("flow blows up before eta = " + show(eta) + " (escape near eta = " +
                                 show(h * (s + 1)) + ")");
      }
    }
    return y;
  }

  std::vector<double> solve(std::vector<double> y0, double eta, double eps, std::size_t n) const {
    if (eta == 0.0) return y0;
    int steps = std::max(8, static_cast<int>(std::ceil(16 * std::abs(eta))));
    std::vector<double> coarse = run(y0, eta, eps, n, steps);
    while (true) {
      std::vector<double> fine = run(y0, eta, eps, n, 2 * steps);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) err = std::max(err, rel_diff(fine[i], coarse[i]));
      if (err <= options.tol) return fine;
      steps *= 2;
      if (2 * steps > options.max_steps) {
        if (err <= options.accept) return fine;
        throw ComputationError("completeness proxy failed: step halving disagreement " + show(err) +
                               " at eta = " + show(eta));
      }
      coarse = std::move(fine);
    }
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// GroupAction

GroupAction::GroupAction(JetSpace jets, Map map, Representation rep, bool projectable,
                         std::string description)
    : jets_(std::move(jets)),
      map_(std::move(map)),
      rep_(rep),
      projectable_(projectable),
      description_(std::move(description)) {}

GroupAction GroupAction::identity(const JetSpace& jets) {
  GroupAction g(
      jets,
      [](double, std::span<const double> x, std::span<const double> u, double,
         std::span<double> xo, std::span<double> uo) {
        std::copy(x.begin(), x.end(), xo.begin());
        std::copy(u.begin(), u.end(), uo.begin());
      },
      Representation::ClosedForm, true, "identity");
  std::vector<Expr> xi, phi;
  for (std::size_t i = 0; i < jets.p(); ++i) xi.push_back(jets.independent_symbol(i));
  for (std::size_t a = 0; a < jets.q(); ++a) phi.push_back(jets.jet(static_cast<int>(a)));
  const std::size_t p = jets.p();
  return g.with_exprs(std::move(xi), std::move(phi)).with_linear_base([p](double) {
    std::vector<double> m(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) m[i * p + i] = 1.0;
    return m;
  });
}

GroupAction GroupAction::with_exprs(std::vector<Expr> xi, std::vector<Expr> phi) const {
  GroupAction g = *this;
  g.xi_exprs_ = std::move(xi);
  g.phi_exprs_ = std::move(phi);
  return g;
}

GroupAction GroupAction::with_linear_base(LinearBase matrix) const {
  GroupAction g = *this;
  g.linear_base_ = std::move(matrix);
  return g;
}

void GroupAction::apply(double eta, std::span<const double> x, std::span<const double> u,
                        double eps, std::span<double> x_out, std::span<double> u_out) const {
  if (x.size() != p() || u.size() != q() || x_out.size() != p() || u_out.size() != q())
    throw InputError("group action applied to a point of the wrong dimension");
  map_(eta, x, u, eps, x_out, u_out);
}

std::vector<double> GroupAction::base(double eta, std::span<const double> x, double eps) const {
  if (!projectable_) throw InputError("base map of a non-projectable group action");
  std::vector<double> out(p());
  if (linear_base_) {
    std::vector<double> m = linear_base_(eta);
    for (std::size_t i = 0; i < p(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < p(); ++j) s += m[i * p() + j] * x[j];
      out[i] = s;
    }
    return out;
  }
  std::vector<double> u(q(), 0.0), uo(q());
  map_(eta, x, u, eps, out, uo);
  return out;
}

std::vector<double> GroupAction::base_inverse(double eta, std::span<const double> x,
                                              double eps) const {
  std::vector<double> y = base(-eta, x, eps);
  if (linear_base_) return y;
  const std::size_t n = p();
  auto residual = [&](const std::vector<double>& z) {
    std::vector<double> r = base(eta, z, eps);
    for (std::size_t i = 0; i < n; ++i) r[i] -= x[i];
    return r;
  };
  auto size = [](const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
  };
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  std::vector<double> r = residual(y);
  for (int it = 0; it < 30 && size(r) > 1e-10 * scale; ++it) {
    Eigen::MatrixXd jac(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> z = y;
      double h = 1e-6 * std::max(1.0, std::abs(y[j]));
      z[j] += h;
      std::vector<double> rp = residual(z);
      z[j] -= 2 * h;
      std::vector<double> rm = residual(z);
      for (std::size_t i = 0; i < n; ++i) jac(i, j) = (rp[i] - rm[i]) / (2 * h);
    }
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(n));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) throw ComputationError("base map is not invertible near the target point");
    Eigen::VectorXd step = lu.solve(rv);
    for (std::size_t i = 0; i < n; ++i) y[i] -= step(static_cast<Eigen::Index>(i));
    r = residual(y);
  }
  if (size(r) > 1e-10 * scale)
    throw ComputationError("base map inversion did not converge (residual " + show(size(r)) + ")");
  return y;
}

// ---------------------------------------------------------------------------
// flow

GroupAction flow(const VectorField& v, const FlowOptions& options) {
  const JetSpace& jets = v.jets();
  const std::size_t p = jets.p(), q = jets.q();
  if (v.is_zero()) return GroupAction::identity(jets);

  std::optional<Base> base;
  if (v.projectable()) base = match_linear_base(v);
  std::vector<Fibre> fibres;
  if (base) {
    for (std::size_t a = 0; a < q; ++a) {
      auto f = match_fibre(v.phi()[a], jets.jet(static_cast<int>(a)), options);
      if (!f) {
        fibres.clear();
        break;
      }
      fibres.push_back(std::move(*f));
    }
  }

  if (base && fibres.size() == q) {
    const Eigen::MatrixXd a = base->a;
    const bool identity = base->identity;
    auto matrix = [a, identity, p](double eta) {
      std::vector<double> m(p * p, 0.0);
      if (identity) {
        for (std::size_t i = 0; i < p; ++i) m[i * p + i] = 1.0;
        return m;
      }
      Eigen::MatrixXd e = (eta * a).exp();
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
          m[i * p + j] = e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      return m;
    };
    auto fibre_fns = std::make_shared<std::vector<Fibre>>(fibres);
    GroupAction g(
        jets,
        [matrix, fibre_fns, p](double eta, std::span<const double> x, std::span<const double> u,
                               double eps, std::span<double> xo, std::span<double> uo) {
          std::vector<double> m = matrix(eta);
          for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) s += m[i * p + j] * x[j];
            xo[i] = s;
          }
          for (std::size_t k = 0; k < fibre_fns->size(); ++k) uo[k] = (*fibre_fns)[k].f(eta, u[k], eps);
        },
        GroupAction::Representation::ClosedForm, true, "exp(eta*(" + v.str() + "))");
    std::vector<Expr> xi = base->exprs;
    if (identity) {
      xi.clear();
      for (std::size_t i = 0; i < p; ++i) xi.push_back(jets.independent_symbol(i));
    }
    std::vector<Expr> phi;
    for (const auto& f : fibres) phi.push_back(f.expr);
    if (xi.size() != p) xi.clear();
    return g.with_exprs(std::move(xi), std::move(phi)).with_linear_base(matrix);
  }

  auto nf = std::make_shared<NumericFlow>();
  nf->p = p;
  nf->q = q;
  nf->options = options;
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < p; ++i) vars.push_back(jets.independent()[i]);
  for (std::size_t a = 0; a < q; ++a) vars.push_back(jets.jet(static_cast<int>(a)).name());
  vars.push_back("eps");
  for (const auto& c : v.xi()) nf->rhs.emplace_back(c, vars, options.registry.get());
  for (const auto& c : v.phi()) nf->rhs.emplace_back(c, vars, options.registry.get());
  const bool projectable = v.projectable();
  return GroupAction(
      jets,
      [nf, p, q, projectable](double eta, std::span<const double> x, std::span<const double> u,
                              double eps, std::span<double> xo, std::span<double> uo) {
        std::vector<double> y(x.begin(), x.end());
        y.insert(y.end(), u.begin(), u.end());
        // A projectable base is integrated on its own so that the fibre
        // cannot spoil it.
        if (projectable && q > 0) {
          std::vector<double> xb = nf->solve(std::vector<double>(x.begin(), x.end()), eta, eps, p);
          std::copy(xb.begin(), xb.end(), xo.begin());
        }
        std::vector<double> r = nf->solve(y, eta, eps, p + q);
        if (!(projectable && q > 0)) std::copy(r.begin(), r.begin() + static_cast<long>(p), xo.begin());
        std::copy(r.begin() + static_cast<long>(p), r.end(), uo.begin());
      },
      GroupAction::Representation::Numeric, projectable, "numeric exp(eta*(" + v.str() + "))");
}

// ---------------------------------------------------------------------------
// Audits

GroupLawReport check_group_law(const GroupAction& g, int samples, std::uint64_t seed, double eps) {
  GroupLawReport r;
  r.samples = samples;
  r.identity_tol = g.closed_form() ? 1e-12 : 1e-10;
  r.composition_tol = g.closed_form() ? 1e-8 : 1e-5;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eta_d(-1.0, 1.0), x_d(-1.0, 1.0), u_d(-0.9, 0.9);
  const std::size_t p = g.p(), q = g.q();
  std::vector<double> x(p), u(q), xa(p), ua(q), xb(p), ub(q), xc(p), uc(q);
  for (int s = 0; s < samples; ++s) {
    double e1 = eta_d(rng), e2 = eta_d(rng);
    for (auto& v : x) v = x_d(rng);
    for (auto& v : u) v = u_d(rng);
    try {
      g.apply(0.0, x, u, eps, xa, ua);
      for (std::size_t i = 0; i < p; ++i) r.identity_error = std::max(r.identity_error, rel_diff(x[i], xa[i]));
      for (std::size_t a = 0; a < q; ++a) r.identity_error = std::max(r.identity_error, rel_diff(u[a], ua[a]));
      g.apply(e1 + e2, x, u, eps, xa, ua);
      g.apply(e2, x, u, eps, xb, ub);
      g.apply(e1, xb, ub, eps, xc, uc);
      for (std::size_t i = 0; i < p; ++i)
        r.composition_error = std::max(r.composition_error, rel_diff(xa[i], xc[i]));
      for (std::size_t a = 0; a < q; ++a)
        r.composition_error = std::max(r.composition_error, rel_diff(ua[a], uc[a]));
    } catch (const DomainError&) {
      ++r.skipped;
    } catch (const ComputationError&) {
      ++r.skipped;
    }
  }
  r.pass = 2 * r.skipped <= samples && r.identity_error <= r.identity_tol &&
           r.composition_error <= r.composition_tol;
  return r;
}

SlowIncrease slow_increase(const GroupAction& g, double eta, const Box& box, double eps) {
  SlowIncrease out;
  const std::size_t p = g.p(), q = g.q();
  // Box center and corners pulled halfway towards it.
  std::vector<std::vector<double>> bases;
  std::vector<double> c(p);
  for (std::size_t i = 0; i < p; ++i)
    c[i] = i < box.dim() ? 0.5 * (box.ranges[i].first + box.ranges[i].second) : 0.0;
  bases.push_back(c);
  if (box.dim() == p && p <= 4) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
      std::vector<double> x(p);
      for (std::size_t i = 0; i < p; ++i) {
        double corner = (mask >> i & 1) ? box.ranges[i].second : box.ranges[i].first;
        x[i] = 0.5 * (c[i] + corner);
      }
      bases.push_back(x);
    }
  }
  const int top = std::max(2, static_cast<int>(std::floor(std::log2(1.0 / eps))));
  std::vector<double> xo(p), uo(q);
  double degree = 0.0;
  try {
    for (const auto& x : bases) {
      for (std::size_t a = 0; a < q; ++a) {
        for (double sign : {-1.0, 1.0}) {
          double prev = 0.0;
          for (int j = 0; j <= top; ++j) {
            std::vector<double> u(q, 0.0);
            u[a] = sign * std::ldexp(1.0, j);
            g.apply(eta, x, u, eps, xo, uo);
            double m = 0.0;
            for (double v : uo) m = std::max(m, std::abs(v));
            double l = std::log1p(m);
            if (j > 0 && 2 * j >= top) degree = std::max(degree, (l - prev) / std::log(2.0));
            prev = l;
          }
        }
      }
    }
  } catch (const Error&) {
    out.domain_limited = true;
    out.degree = NAN;
    return out;
  }
  out.degree = degree;
  out.slowly_increasing = degree < 12.0;
  return out;
}

ActionResult apply_action(const std::vector<GenFunc>& u, const GroupAction& g, double eta,
                          std::optional<Box> domain) {
  if (!g.projectable()) throw InputError("group actions on functions need a projectable group");
  const std::size_t p = g.p(), q = g.q();
  if (u.size() != q)
    throw InputError("group action needs " + std::to_string(q) + " component functions");
  for (const auto& f : u)
    if (f.arity() != p) throw InputError("component function arity does not match the base dimension");
  ActionResult out;
  Box target = domain ? *domain : u[0].domain();
  out.slow = slow_increase(g, eta, target);
  if (out.slow.domain_limited)
    out.warnings.push_back("Phi is not defined on all of |u| <= 1/eps; slow increase holds only on its domain");
  else if (!out.slow.slowly_increasing)
    out.warnings.push_back("Phi fails the slow-increase audit (degree " + show(out.slow.degree) + ")");

  // Loci are transported exactly through linear bases.
  std::vector<Hyperplane> loci;
  if (g.linear_base()) {
    std::vector<double> b = g.linear_base()(-eta);
    for (const auto& f : u) {
      for (const auto& h : f.loci()) {
        Hyperplane t{std::vector<double>(p, 0.0), h.offset};
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t j = 0; j < p; ++j) t.normal[i] += b[j * p + i] * h.normal[j];
        loci.push_back(std::move(t));
      }
    }
  }

  auto comps = std::make_shared<const std::vector<GenFunc>>(u);
  auto act = std::make_shared<const GroupAction>(g);
  std::ostringstream prov;
  prov << "g_eta with eta = " << eta << ": " << g.description();
  for (std::size_t a = 0; a < q; ++a) {
    GenFunc::Evaluator ev = [comps, act, eta, a, p, q](std::span<const double> xt, double eps) {
      std::vector<double> x = act->base_inverse(eta, xt, eps);
      std::vector<double> uv(q), xo(p), uo(q);
      for (std::size_t k = 0; k < q; ++k) uv[k] = (*comps)[k](x, eps);
      act->apply(eta, x, uv, eps, xo, uo);
      return uo[a];
    };
    GenFunc f(p, ev, target, u[a].growth(), prov.str());
    out.functions.push_back(f.with_loci(loci));
  }
  return out;
}

AlgsymgReport algsymg_check(const GenFunc& f, const GeneralizedField& x,
                            const std::vector<GeneralizedPoint>& points, const EpsLadder& ladder,
                            int q, const GroupAction* action, const EstimateOptions& options) {
  const std::size_t n = f.arity();
  if (x.components.size() != n)
    throw InputError("vector field dimension does not match the level-set function");
  if (q < 1) throw InputError("negligibility order must be positive");
  if (action && (action->p() != n || action->q() != 0))
    throw InputError("invariance action must act on R^n without fibre");
  AlgsymgReport report;
  report.q = q;
  std::vector<GenFunc> partials;
  for (std::size_t i = 0; i < n; ++i) partials.push_back(f.partial(i));
  const std::vector<double> eps = ladder.values();
  auto negligible = [&](const std::vector<double>& values, double& slope) -> bool {
    std::vector<double> mag;
    for (double v : values) mag.push_back(std::abs(v));
    NegligibilityResult r = negligibility_from_table(eps, mag, q, options);
    slope = r.slope;
    return r.pass[static_cast<std::size_t>(q - 1)];
  };
  bool all = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::vector<double> fv, xf;
    std::vector<std::vector<double>> at;
    for (double e : eps) {
      std::vector<double> p = points[k].at(e);
      if (p.size() != n) throw InputError("generalized point has the wrong dimension");
      fv.push_back(f(p, e));
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x.components[i](p, e) * partials[i](p, e);
      xf.push_back(s);
      at.push_back(std::move(p));
    }
    AlgsymgPoint pt;
    pt.index = k;
    pt.on_level_set = negligible(fv, pt.level_slope);
    if (!pt.on_level_set) {
      report.skipped.push_back(k);
      continue;
    }
    pt.tangent = negligible(xf, pt.tangency_slope);
    if (action) {
      bool inv = true;
      for (double eta : {0.25, 0.5, 1.0}) {
        std::vector<double> moved;
        for (std::size_t r = 0; r < eps.size(); ++r) {
          std::vector<double> xo(n);
          action->apply(eta, at[r], {}, eps[r], xo, {});
          moved.push_back(f(xo, eps[r]));
        }
        double slope = 0.0;
        inv = inv && negligible(moved, slope);
      }
      pt.invariant = inv;
      all = all && inv;
    }
    all = all && pt.tangent;
    report.points.push_back(pt);
  }
  report.pass = all && !report.points.empty();
  return report;
}

}  // namespace genlie
