#include "genlie/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace genlie {
namespace {

Expr simplify_add(std::vector<Expr> terms);
Expr simplify_mul(std::vector<Expr> factors);
Expr simplify_pow(const Expr& base, const Expr& exponent);
Expr simplify_func(Fn fn, const Expr& arg);

bool exact_int(const Expr& e, std::int64_t& out) {
  if (!e.is_number() || !e.number().exact() || e.number().denominator() != 1) return false;
  out = e.number().numerator();
  return true;
}

bool is_perfect_square(std::int64_t v, std::int64_t& root) {
  if (v < 0) return false;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  for (std::int64_t c = std::max<std::int64_t>(0, r - 1); c <= r + 1; ++c) {
    if (c * c == v) {
      root = c;
      return true;
    }
  }
  return false;
}

Expr real_or_keep(double v, const Expr& fallback) {
  return std::isfinite(v) ? Expr(Number::real(v)) : fallback;
}

Expr simplify_add(std::vector<Expr> input) {
  std::vector<Expr> flat;
  for (auto& t : input) {
    if (t.kind() == Kind::Add) {
      for (const Expr& s : t.args()) flat.push_back(s);
    } else {
      flat.push_back(t);
    }
  }
  Number constant(0);
  std::map<Expr, Number, ExprLess> groups;
  for (const Expr& t : flat) {
    if (t.is_number()) {
      constant = constant + t.number();
      continue;
    }
    auto [c, rest] = split_coefficient(t);
    auto it = groups.find(rest);
    if (it == groups.end()) {
      groups.emplace(rest, c);
    } else {
      it->second = it->second + c;
    }
  }
  std::vector<Expr> out;
  if (!constant.is_zero()) out.push_back(Expr(constant));
  for (auto& [rest, c] : groups) {
    if (c.is_zero()) continue;
    if (c.is_one()) {
      out.push_back(rest);
    } else if (rest.kind() == Kind::Mul) {
      std::vector<Expr> f{Expr(c)};
      for (const Expr& a : rest.args()) f.push_back(a);
      out.push_back(mul(std::move(f)));
    } else {
      out.push_back(mul({Expr(c), rest}));
    }
  }
  if (out.empty()) return Expr(constant.exact() ? Number(0) : constant);
  std::sort(out.begin(), out.end(), ExprLess{});
  return add(std::move(out));
}

Expr simplify_mul_once(const std::vector<Expr>& input, bool& changed) {
  std::vector<Expr> flat;
  for (const auto& f : input) {
    if (f.kind() == Kind::Mul) {
      for (const Expr& s : f.args()) flat.push_back(s);
    } else {
      flat.push_back(f);
    }
  }
  Number coeff(1);
  std::map<Expr, std::vector<Expr>, ExprLess> bases;
  for (const Expr& f : flat) {
    if (f.is_number()) {
      coeff = coeff * f.number();
      continue;
    }
    if (f.kind() == Kind::Pow) {
      bases[f.arg(0)].push_back(f.arg(1));
    } else {
      bases[f].push_back(Expr(1));
    }
  }
  if (coeff.is_zero()) return Expr(coeff.exact() ? Number(0) : coeff);
  std::vector<Expr> out;
  for (auto& [base, exps] : bases) {
    Expr exponent = exps.size() == 1 ? exps[0] : simplify_add(exps);
    Expr p = simplify_pow(base, exponent);
    if (p.is_number()) {
      coeff = coeff * p.number();
      changed = true;
      continue;
    }
    if (p.kind() == Kind::Mul || (p.kind() == Kind::Pow && p.arg(0) != base) ||
        (p.kind() != Kind::Pow && p != base)) {
      changed = true;
    }
    out.push_back(p);
  }
  if (coeff.is_zero()) return Expr(0);
  // A numeric coefficient distributes over a single sum factor.
  if (out.size() == 1 && out[0].kind() == Kind::Add && !coeff.is_one()) {
    std::vector<Expr> terms;
    for (const Expr& t : out[0].args()) terms.push_back(simplify_mul({Expr(coeff), t}));
    return simplify_add(std::move(terms));
  }
  if (out.empty()) return Expr(coeff);
  if (!coeff.is_one()) out.push_back(Expr(coeff));
  std::sort(out.begin(), out.end(), ExprLess{});
  return mul(std::move(out));
}

Expr simplify_mul(std::vector<Expr> factors) {
  Expr current;
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    current = simplify_mul_once(factors, changed);
    if (!changed || current.kind() != Kind::Mul) return current;
    factors.assign(current.args().begin(), current.args().end());
  }
  return current;
}

Expr simplify_pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_zero()) return Expr(1);
  if (exponent.is_one()) return base;
  if (base.is_one()) return Expr(1);
  std::int64_t n = 0;
  bool int_exp = exact_int(exponent, n);
  if (base.is_zero() && exponent.is_number() && !exponent.number().is_negative()) return Expr(0);
  if (base.is_number() && exponent.is_number()) {
    const Number& b = base.number();
    if (int_exp && !(b.is_zero() && n < 0)) return Expr(b.pow(n));
    const Number& e = exponent.number();
    if (b.exact() && e.exact() && e.denominator() == 2 && !b.is_negative()) {
      std::int64_t rn = 0, rd = 0;
      if (is_perfect_square(b.numerator(), rn) && is_perfect_square(b.denominator(), rd)) {
        return Expr(Number::rational(rn, rd).pow(e.numerator()));
      }
      return power(base, exponent);
    }
    if (!b.exact() || !e.exact()) {
      if (b.value() > 0.0) return real_or_keep(std::pow(b.value(), e.value()), power(base, exponent));
    }
    return power(base, exponent);
  }
  if (base.kind() == Kind::Pow && int_exp) {
    return simplify_pow(base.arg(0), simplify_mul({base.arg(1), exponent}));
  }
  if (base.kind() == Kind::Mul && int_exp) {
    std::vector<Expr> f;
    for (const Expr& a : base.args()) f.push_back(simplify_pow(a, exponent));
    return simplify_mul(std::move(f));
  }
  if (base.kind() == Kind::Func && base.fn() == Fn::Sqrt && int_exp && n % 2 == 0) {
    return simplify_pow(base.arg(0), Expr(Number(n / 2)));
  }
  if (base.kind() == Kind::Func && base.fn() == Fn::Exp && int_exp) {
    return simplify_func(Fn::Exp, simplify_mul({base.arg(0), exponent}));
  }
  return power(base, exponent);
}

bool is_fn(const Expr& e, Fn fn) { return e.kind() == Kind::Func && e.fn() == fn; }

Expr fold_number(Fn fn, const Expr& arg) {
  const Number& x = arg.number();
  if (x.is_zero()) {
    switch (fn) {
      case Fn::Exp:
      case Fn::Cos:
      case Fn::Cosh:
        return Expr(1);
      case Fn::Sin:
      case Fn::Tanh:
      case Fn::Artanh:
      case Fn::Sinh:
      case Fn::Arsinh:
      case Fn::Sqrt:
      case Fn::Abs:
      case Fn::Sign:
        return Expr(0);
      case Fn::Log:
        return func(fn, arg);
    }
  }
  if (fn == Fn::Log && x.is_one()) return Expr(0);
  if (fn == Fn::Abs) return Expr(x.is_negative() ? -x : x);
  if (fn == Fn::Sign) return Expr(x.is_negative() ? -1 : 1);
  if (fn == Fn::Sqrt && x.exact() && !x.is_negative()) {
    std::int64_t rn = 0, rd = 0;
    if (is_perfect_square(x.numerator(), rn) && is_perfect_square(x.denominator(), rd)) {
      return Expr(Number::rational(rn, rd));
    }
  }
  if (x.exact()) return func(fn, arg);
  double v = x.value();
  double r = 0.0;
  switch (fn) {
    case Fn::Exp: r = std::exp(v); break;
    case Fn::Log: r = v > 0 ? std::log(v) : NAN; break;
    case Fn::Sin: r = std::sin(v); break;
    case Fn::Cos: r = std::cos(v); break;
    case Fn::Tanh: r = std::tanh(v); break;
    case Fn::Artanh: r = std::fabs(v) < 1 ? std::atanh(v) : NAN; break;
    case Fn::Sinh: r = std::sinh(v); break;
    case Fn::Cosh: r = std::cosh(v); break;
    case Fn::Arsinh: r = std::asinh(v); break;
    case Fn::Sqrt: r = v >= 0 ? std::sqrt(v) : NAN; break;
    default: return func(fn, arg);
  }
  return real_or_keep(r, func(fn, arg));
}

Expr simplify_func(Fn fn, const Expr& arg) {
  if (arg.is_number()) return fold_number(fn, arg);
  if (arg.kind() == Kind::Func) {
    const Expr& inner = arg.arg(0);
    switch (fn) {
      case Fn::Artanh:
        if (is_fn(arg, Fn::Tanh)) return inner;
        break;
      case Fn::Tanh:
        if (is_fn(arg, Fn::Artanh)) return inner;
        break;
      case Fn::Arsinh:
        if (is_fn(arg, Fn::Sinh)) return inner;
        break;
      case Fn::Sinh:
        if (is_fn(arg, Fn::Arsinh)) return inner;
        break;
      case Fn::Exp:
        if (is_fn(arg, Fn::Log)) return inner;
        break;
      case Fn::Log:
        if (is_fn(arg, Fn::Exp)) return inner;
        break;
      default:
        break;
    }
  }
  return func(fn, arg);
}

Expr simplify_apply(const Expr& e, std::vector<Expr> args) {
  auto orders = e.orders();
  bool plain = std::all_of(orders.begin(), orders.end(), [](int o) { return o == 0; });
  if (plain && !e.inverse().empty() && args.size() == 1 && args[0].kind() == Kind::Apply &&
      args[0].name() == e.inverse()) {
    auto io = args[0].orders();
    if (std::all_of(io.begin(), io.end(), [](int o) { return o == 0; })) return args[0].arg(0);
  }
  return apply(e.name(), {e.params().begin(), e.params().end()}, {orders.begin(), orders.end()},
               std::move(args), e.inverse());
}

std::vector<Expr> simplified_args(const Expr& e) {
  std::vector<Expr> out;
  out.reserve(e.args().size());
  for (const Expr& a : e.args()) out.push_back(simplify(a));
  return out;
}

// Distributes a product of (already expanded) factors.
Expr distribute(const std::vector<Expr>& factors) {
  std::vector<Expr> acc{Expr(1)};
  for (const Expr& f : factors) {
    std::vector<Expr> next;
    if (f.kind() == Kind::Add) {
      for (const Expr& a : acc)
        for (const Expr& t : f.args()) next.push_back(simplify_mul({a, t}));
    } else {
      for (const Expr& a : acc) next.push_back(simplify_mul({a, f}));
    }
    acc = std::move(next);
  }
  return simplify_add(std::move(acc));
}

}  // namespace

std::pair<Number, Expr> split_coefficient(const Expr& term) {
  if (term.is_number()) return {term.number(), Expr(1)};
  if (term.kind() != Kind::Mul) return {Number(1), term};
  Number c(1);
  std::vector<Expr> rest;
  for (const Expr& f : term.args()) {
    if (f.is_number()) {
      c = c * f.number();
    } else {
      rest.push_back(f);
    }
  }
  return {c, mul(std::move(rest))};
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Symbol:
      return e;
    case Kind::Add:
      return simplify_add(simplified_args(e));
    case Kind::Mul:
      return simplify_mul(simplified_args(e));
    case Kind::Pow:
      return simplify_pow(simplify(e.arg(0)), simplify(e.arg(1)));
    case Kind::Func:
      return simplify_func(e.fn(), simplify(e.arg(0)));
    case Kind::Apply:
      return simplify_apply(e, simplified_args(e));
  }
  return e;
}

Expr expand(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Symbol:
      return e;
    case Kind::Add: {
      std::vector<Expr> t;
      for (const Expr& a : e.args()) t.push_back(expand(a));
      return simplify_add(std::move(t));
    }
    case Kind::Mul: {
      std::vector<Expr> f;
      for (const Expr& a : e.args()) f.push_back(expand(a));
      return distribute(f);
    }
    case Kind::Pow: {
      Expr base = expand(e.arg(0));
      Expr ex = simplify(e.arg(1));
      std::int64_t n = 0;
      if (base.kind() == Kind::Add && exact_int(ex, n) && n > 1 && n <= 16) {
        return distribute(std::vector<Expr>(static_cast<std::size_t>(n), base));
      }
      Expr p = simplify_pow(base, ex);
      if (p.kind() == Kind::Mul) return distribute({p.args().begin(), p.args().end()});
      return p;
    }
    case Kind::Func:
      return simplify_func(e.fn(), expand(e.arg(0)));
    case Kind::Apply: {
      std::vector<Expr> a;
      for (const Expr& x : e.args()) a.push_back(expand(x));
      return simplify_apply(e, std::move(a));
    }
  }
  return e;
}

}  // namespace genlie
