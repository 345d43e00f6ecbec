#include "genlie/collect.hpp"

#include <map>

#include "genlie/simplify.hpp"

namespace genlie {
namespace {

bool has_split_jet(const Expr& e, int min_order) {
  if (e.is_jet()) return e.jet_order() >= min_order;
  for (const Expr& a : e.args())
    if (has_split_jet(a, min_order)) return true;
  return false;
}

bool split_jet_power(const Expr& f, int min_order) {
  if (f.is_jet()) return f.jet_order() >= min_order;
  if (f.kind() != Kind::Pow || !f.arg(0).is_jet() || f.arg(0).jet_order() < min_order) return false;
  const Expr& x = f.arg(1);
  return x.is_number() && x.number().is_integer() && !x.number().is_negative();
}

}  // namespace

JetPolynomial collect_jets(const Expr& e, int min_order) {
  JetPolynomial out;
  Expr ex = expand(e);
  std::vector<Expr> terms;
  if (ex.kind() == Kind::Add) {
    terms.assign(ex.args().begin(), ex.args().end());
  } else if (!ex.is_zero()) {
    terms.push_back(ex);
  }
  std::map<Expr, std::vector<Expr>, ExprLess> groups;
  for (const Expr& t : terms) {
    std::vector<Expr> factors;
    if (t.kind() == Kind::Mul) {
      factors.assign(t.args().begin(), t.args().end());
    } else {
      factors.push_back(t);
    }
    std::vector<Expr> mono, coeff;
    for (const Expr& f : factors) {
      if (split_jet_power(f, min_order)) {
        mono.push_back(f);
      } else {
        if (has_split_jet(f, min_order)) out.polynomial = false;
        coeff.push_back(f);
      }
    }
    groups[simplify(mul(std::move(mono)))].push_back(mul(std::move(coeff)));
  }
  if (!out.polynomial) {
    out.terms = {{Expr(1), ex}};
    return out;
  }
  for (auto& [m, c] : groups) {
    Expr coeff = simplify(add(std::move(c)));
    if (!coeff.is_zero()) out.terms.emplace_back(m, coeff);
  }
  return out;
}

}  // namespace genlie
