#include "genlie/calculus.hpp"

#include <functional>
#include <set>
#include <unordered_map>

#include "genlie/error.hpp"
#include "genlie/simplify.hpp"

namespace genlie {
namespace {

// Raw derivative, memoized per call on node identity.
class Differentiator {
 public:
  explicit Differentiator(std::string name) : name_(std::move(name)) {}

  Expr operator()(const Expr& e) {
    if (!depends_on(e, name_)) return Expr(0);
    auto it = memo_.find(e.node());
    if (it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(e.node(), d);
    keep_.push_back(e);
    return d;
  }

 private:
  std::string name_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;

  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case Kind::Number:
        return Expr(0);
      case Kind::Symbol:
        return Expr(e.name() == name_ ? 1 : 0);
      case Kind::Add: {
        std::vector<Expr> t;
        for (const Expr& a : e.args()) t.push_back((*this)(a));
        return simplify(add(std::move(t)));
      }
      case Kind::Mul: {
        auto f = e.args();
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < f.size(); ++i) {
          Expr di = (*this)(f[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> prod(f.begin(), f.end());
          prod[i] = di;
          terms.push_back(mul(std::move(prod)));
        }
        return simplify(add(std::move(terms)));
      }
      case Kind::Pow: {
        const Expr& b = e.arg(0);
        const Expr& x = e.arg(1);
        Expr db = (*this)(b);
        Expr dx = (*this)(x);
        std::vector<Expr> terms;
        if (!db.is_zero()) terms.push_back(mul({x, power(b, simplify(x - Expr(1))), db}));
        if (!dx.is_zero()) terms.push_back(mul({e, func(Fn::Log, b), dx}));
        return simplify(add(std::move(terms)));
      }
      case Kind::Func:
        return simplify(mul({outer(e.fn(), e.arg(0), e), (*this)(e.arg(0))}));
      case Kind::Apply: {
        auto args = e.args();
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < args.size(); ++i) {
          Expr da = (*this)(args[i]);
          if (da.is_zero()) continue;
          std::vector<int> orders(e.orders().begin(), e.orders().end());
          orders[i]++;
          Expr fi = apply(e.name(), {e.params().begin(), e.params().end()}, std::move(orders),
                          {args.begin(), args.end()}, e.inverse());
          terms.push_back(mul({fi, da}));
        }
        return simplify(add(std::move(terms)));
      }
    }
    return Expr(0);
  }

  static Expr outer(Fn fn, const Expr& a, const Expr& self) {
    switch (fn) {
      case Fn::Exp:
        return self;
      case Fn::Log:
        return power(a, Expr(-1));
      case Fn::Sin:
        return func(Fn::Cos, a);
      case Fn::Cos:
        return -func(Fn::Sin, a);
      case Fn::Tanh:
        return Expr(1) - power(self, Expr(2));
      case Fn::Artanh:
        return power(Expr(1) - power(a, Expr(2)), Expr(-1));
      case Fn::Sinh:
        return func(Fn::Cosh, a);
      case Fn::Cosh:
        return func(Fn::Sinh, a);
      case Fn::Arsinh:
        return power(Expr(1) + power(a, Expr(2)), Expr(Number::rational(-1, 2)));
      case Fn::Sqrt:
        return mul({Expr(Number::rational(1, 2)), power(self, Expr(-1))});
      case Fn::Abs:
      case Fn::Sign:
        throw DomainError(std::string("cannot differentiate non-smooth function '") + fn_name(fn) +
                          "'");
    }
    return Expr(0);
  }
};

}  // namespace

Expr diff(const Expr& e, const std::string& symbol_name, int times) {
  Expr out = e;
  for (int k = 0; k < times; ++k) {
    Differentiator d(symbol_name);
    out = d(out);
  }
  return out;
}

Expr diff(const Expr& e, const Expr& v, int times) {
  if (!v.is_symbol()) throw InputError("diff: '" + v.str() + "' is not a variable");
  return diff(e, v.name(), times);
}

Expr total_derivative(const Expr& e, std::size_t i, const JetSpace& jets) {
  if (i >= jets.p()) throw InputError("total_derivative: independent index out of range");
  std::vector<Expr> terms{diff(e, jets.independent()[i])};
  for (const Expr& s : free_symbols(e)) {
    if (!s.is_jet()) continue;
    Expr ds = diff(e, s);
    if (ds.is_zero()) continue;
    std::vector<int> counts(s.orders().begin(), s.orders().end());
    counts.resize(jets.p(), 0);
    counts[i]++;
    terms.push_back(mul({jets.jet(s.dependent(), counts), ds}));
  }
  return simplify(add(std::move(terms)));
}

Expr total_derivative(const Expr& e, const std::vector<int>& counts, const JetSpace& jets) {
  Expr out = e;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (int k = 0; k < counts[i]; ++k) out = total_derivative(out, i, jets);
  return out;
}

namespace {

void check_acyclic(const Rules& rules) {
  // Edges v -> w when the rule for v mentions w (w != v, w has a rule).
  std::map<std::string, std::vector<std::string>> edges;
  for (const auto& [v, rhs] : rules) {
    for (const Expr& s : free_symbols(rhs)) {
      if (s.name() != v && rules.count(s.name())) edges[v].push_back(s.name());
    }
  }
  std::map<std::string, int> state;  // 1 = on stack, 2 = done
  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    state[v] = 1;
    for (const auto& w : edges[v]) {
      if (state[w] == 1) throw InputError("cyclic substitution rules involving '" + v + "'");
      if (state[w] == 0) visit(w);
    }
    state[v] = 2;
  };
  for (const auto& [v, rhs] : rules)
    if (state[v] == 0) visit(v);
}

Expr rebuild(const Expr& e, std::vector<Expr> args) {
  switch (e.kind()) {
    case Kind::Add:
      return add(std::move(args));
    case Kind::Mul:
      return mul(std::move(args));
    case Kind::Pow:
      return power(args[0], args[1]);
    case Kind::Func:
      return func(e.fn(), args[0]);
    case Kind::Apply:
      return apply(e.name(), {e.params().begin(), e.params().end()},
                   {e.orders().begin(), e.orders().end()}, std::move(args), e.inverse());
    default:
      return e;
  }
}

Expr replace(const Expr& e, const Rules& rules) {
  if (e.is_symbol()) {
    auto it = rules.find(e.name());
    return it == rules.end() ? e : it->second;
  }
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  for (const Expr& a : e.args()) args.push_back(replace(a, rules));
  return rebuild(e, std::move(args));
}

}  // namespace

Expr substitute_raw(const Expr& e, const Rules& rules) {
  check_acyclic(rules);
  return replace(e, rules);
}

Expr substitute(const Expr& e, const Rules& rules) { return simplify(substitute_raw(e, rules)); }

Expr change_variables(const Expr& e, const Rules& rules) { return replace(e, rules); }

namespace {

Expr instantiate_rec(const Expr& e, const std::string& name, const std::vector<std::string>& params,
                     const Expr& body) {
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  for (const Expr& a : e.args()) args.push_back(instantiate_rec(a, name, params, body));
  if (e.kind() == Kind::Apply && e.name() == name) {
    if (args.size() != params.size()) {
      throw InputError("instantiate: arity mismatch for '" + name + "'");
    }
    Expr d = body;
    auto orders = e.orders();
    for (std::size_t i = 0; i < params.size(); ++i) d = diff(d, params[i], orders[i]);
    Rules r;
    for (std::size_t i = 0; i < params.size(); ++i) r[params[i]] = args[i];
    return replace(d, r);
  }
  return rebuild(e, std::move(args));
}

}  // namespace

Expr instantiate(const Expr& e, const std::string& name, const std::vector<std::string>& params,
                 const Expr& body) {
  return simplify(instantiate_rec(e, name, params, body));
}

}  // namespace genlie
