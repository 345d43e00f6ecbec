#include "genlie/system.hpp"

#include "genlie/calculus.hpp"
#include "genlie/collect.hpp"
#include "genlie/error.hpp"
#include "genlie/simplify.hpp"

namespace genlie {

namespace {

int max_jet_order(const Expr& e) {
  int m = 0;
  for (const auto& s : free_symbols(e))
    if (s.is_jet()) m = std::max(m, s.jet_order());
  return m;
}

Expr factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return Expr(Number(static_cast<std::int64_t>(f)));
}

bool is_zero_expr(const Expr& e) { return simplify(expand(e)).is_zero(); }

// Rewrites z^m (m >= power) in one monomial of an expanded sum.
Expr reduce_monomial(const Expr& term, const SolvedForm& f) {
  auto reduce_factor = [&](const Expr& factor, bool& changed) -> Expr {
    int m = 0;
    if (factor == f.variable) {
      m = 1;
    } else if (factor.kind() == Kind::Pow && factor.arg(0) == f.variable &&
               factor.arg(1).is_number() && factor.arg(1).number().is_integer()) {
      m = static_cast<int>(factor.arg(1).number().value());
    }
    if (m < f.power) return factor;
    changed = true;
    return power(f.value, Expr(m / f.power)) * power(f.variable, Expr(m % f.power));
  };
  bool changed = false;
  if (term.kind() == Kind::Mul) {
    std::vector<Expr> factors;
    for (const auto& a : term.args()) factors.push_back(reduce_factor(a, changed));
    return changed ? mul(factors) : term;
  }
  return reduce_factor(term, changed);
}

}  // namespace

DifferentialSystem::DifferentialSystem(JetSpace jets, std::vector<Expr> equations)
    : jets_(std::move(jets)), equations_(std::move(equations)) {
  if (equations_.empty()) throw InputError("a differential system needs at least one equation");
  for (auto& e : equations_) {
    e = simplify(e);
    for (const auto& s : free_symbols(e))
      if (s.is_jet() && (s.dependent() >= static_cast<int>(jets_.q()) ||
                         s.orders().size() != jets_.p()))
        throw InputError("equation " + e.str() + " uses a foreign jet variable " + s.name());
    order_ = std::max(order_, max_jet_order(e));
  }
  if (order_ > jets_.max_order())
    throw JetOrderError("system order " + std::to_string(order_) +
                        " exceeds the jet space order " + std::to_string(jets_.max_order()));
  solved_.resize(equations_.size());
}

bool DifferentialSystem::has_solved_form() const {
  for (const auto& s : solved_)
    if (s) return true;
  return false;
}

DifferentialSystem& DifferentialSystem::solve_for(std::size_t nu, const Expr& variable, int power) {
  if (nu >= equations_.size()) throw InputError("solved form for a nonexistent equation");
  if (!variable.is_jet()) throw InputError("solved variable must be a jet coordinate");
  if (power < 1) throw InputError("solved form power must be positive");
  const Expr& delta = equations_[nu];
  Expr c = simplify(diff(delta, variable, power) / factorial(power));
  if (!c.is_number() || c.is_zero())
    throw InputError("equation " + delta.str() + " is not c*" + variable.str() + "^" +
                     std::to_string(power) + " + (terms free of it) with constant c");
  Expr rest = simplify(expand(delta - c * genlie::power(variable, Expr(power))));
  if (depends_on(rest, variable.name()))
    throw InputError("equation " + delta.str() + " cannot be solved for " + variable.str() +
                     "^" + std::to_string(power));
  solved_[nu] = SolvedForm{variable, power, simplify(-rest / c), c};
  return *this;
}

DifferentialSystem& DifferentialSystem::set_solved(std::size_t nu, SolvedForm form) {
  if (nu >= equations_.size()) throw InputError("solved form for a nonexistent equation");
  if (!form.variable.is_jet()) throw InputError("solved variable must be a jet coordinate");
  if (depends_on(form.value, form.variable.name()))
    throw InputError("solved value must not contain the solved variable");
  form.value = simplify(form.value);
  form.coefficient = simplify(form.coefficient);
  Expr gap = equations_[nu] -
             form.coefficient * (power(form.variable, Expr(form.power)) - form.value);
  if (!is_zero_expr(gap))
    throw InputError("declared solved form does not match equation " + equations_[nu].str());
  solved_[nu] = std::move(form);
  return *this;
}

Expr DifferentialSystem::reduce(const Expr& e) const {
  Rules linear;
  std::vector<SolvedForm> powers;
  for (const auto& s : solved_) {
    if (!s) continue;
    if (s->power == 1)
      linear[s->variable.name()] = s->value;
    else
      powers.push_back(*s);
  }
  Expr out = linear.empty() ? simplify(e) : substitute(e, linear);
  for (int pass = 0; pass < 8 && !powers.empty(); ++pass) {
    Expr x = expand(out);
    bool changed = false;
    for (const auto& f : powers) {
      std::vector<Expr> terms;
      auto each = [&](const Expr& t) {
        Expr r = reduce_monomial(t, f);
        if (r != t) changed = true;
        terms.push_back(r);
      };
      if (x.kind() == Kind::Add)
        for (const auto& t : x.args()) each(t);
      else
        each(x);
      x = add(terms);
    }
    out = simplify(expand(x));
    if (!changed) break;
    if (!linear.empty()) out = substitute(out, linear);
  }
  return out;
}

std::vector<Expr> apply_infinitesimal(const VectorField& v, const DifferentialSystem& sys) {
  if (v.jets().independent() != sys.jets().independent() ||
      v.jets().dependent() != sys.jets().dependent())
    throw InputError("vector field and system live on different jet spaces");
  ProlongedField pr = prolong(v, sys.order());
  std::vector<Expr> out;
  for (const auto& delta : sys.equations()) out.push_back(pr.apply(delta));
  return out;
}

DeterminingEquations determining_equations(const DifferentialSystem& sys,
                                           const VectorField& ansatz) {
  if (!sys.has_solved_form())
    throw InputError("determining equations need a declared solved variable");
  DeterminingEquations out;
  std::vector<Expr> applied = apply_infinitesimal(ansatz, sys);
  for (std::size_t nu = 0; nu < applied.size(); ++nu) {
    Expr r = sys.reduce(applied[nu]);
    JetPolynomial poly = collect_jets(r, 1);
    if (!poly.polynomial) {
      out.split = false;
      out.warnings.push_back("equation " + std::to_string(nu + 1) +
                             " is not polynomial in the jets; returned unsplit");
    }
    for (auto& [monomial, coeff] : poly.terms) {
      Expr c = simplify(coeff);
      if (c.is_zero()) continue;
      out.monomials.push_back(monomial);
      out.equations.push_back(c);
    }
  }
  return out;
}

OgthVerdict ogth_criterion(const DifferentialSystem& sys) {
  if (sys.size() != 1) throw InputError("the constant-coefficient criterion needs a scalar equation");
  OgthVerdict v;
  const Expr& delta = sys.equations()[0];
  std::vector<Expr> z = sys.jets().coordinates(sys.order());
  for (std::size_t k = sys.jets().p(); k < z.size(); ++k) {
    Expr d = simplify(diff(delta, z[k]));
    if (d.is_number() && !d.is_zero()) {
      v.met = true;
      v.k = k + 1;
      v.coordinate = z[k];
      v.c = d;
      v.message = "dDelta/d" + z[k].str() + " = " + d.str();
      return v;
    }
  }
  v.message = "criterion not met";
  return v;
}

}  // namespace genlie
