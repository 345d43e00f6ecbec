#include "genlie/vector_field.hpp"

#include <map>
#include <sstream>

#include "genlie/calculus.hpp"
#include "genlie/error.hpp"
#include "genlie/simplify.hpp"

namespace genlie {

namespace {

int max_jet_order(const Expr& e) {
  int m = -1;
  for (const auto& s : free_symbols(e))
    if (s.is_jet()) m = std::max(m, s.jet_order());
  return m;
}

bool has_dependent(const Expr& e) {
  for (const auto& s : free_symbols(e))
    if (s.is_jet()) return true;
  return false;
}

// Point-field coefficients may only involve order-0 jets, and must live in
// the given jet space.
void check_coefficient(const Expr& c, const JetSpace& jets) {
  for (const auto& s : free_symbols(c)) {
    if (!s.is_jet()) continue;
    if (s.jet_order() > 0)
      throw InputError("vector field coefficient " + c.str() + " depends on the derivative " +
                       s.name());
    if (s.dependent() >= static_cast<int>(jets.q()) || s.orders().size() != jets.p())
      throw InputError("vector field coefficient " + c.str() + " uses a foreign jet variable");
  }
}

Expr clean(const Expr& e, int max_order) {
  Expr s = simplify(e);
  if (max_jet_order(s) > max_order) s = simplify(expand(s));
  if (max_jet_order(s) > max_order)
    throw ComputationError("prolongation left uncancelled jets of order " +
                           std::to_string(max_order + 1) + " in " + s.str());
  return s;
}

}  // namespace

VectorField::VectorField(JetSpace jets, std::vector<Expr> xi, std::vector<Expr> phi)
    : jets_(std::move(jets)), xi_(std::move(xi)), phi_(std::move(phi)) {
  if (xi_.size() != jets_.p())
    throw InputError("vector field needs " + std::to_string(jets_.p()) + " xi coefficients, got " +
                     std::to_string(xi_.size()));
  if (phi_.size() != jets_.q())
    throw InputError("vector field needs " + std::to_string(jets_.q()) +
                     " phi coefficients, got " + std::to_string(phi_.size()));
  for (auto& c : xi_) {
    c = simplify(c);
    check_coefficient(c, jets_);
    if (has_dependent(c)) projectable_ = false;
  }
  for (auto& c : phi_) {
    c = simplify(c);
    check_coefficient(c, jets_);
  }
}

VectorField VectorField::zero(const JetSpace& jets) {
  return VectorField(jets, std::vector<Expr>(jets.p(), Expr(0)),
                     std::vector<Expr>(jets.q(), Expr(0)));
}

bool VectorField::is_zero() const {
  for (const auto& c : xi_)
    if (!c.is_zero()) return false;
  for (const auto& c : phi_)
    if (!c.is_zero()) return false;
  return true;
}

std::string VectorField::str() const {
  std::ostringstream os;
  bool first = true;
  auto term = [&](const Expr& c, const std::string& var) {
    if (c.is_zero()) return;
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")*d/d" << var;
  };
  for (std::size_t i = 0; i < xi_.size(); ++i) term(xi_[i], jets_.independent()[i]);
  for (std::size_t a = 0; a < phi_.size(); ++a) term(phi_[a], jets_.dependent()[a]);
  if (first) os << "0";
  return os.str();
}

VectorField add(const VectorField& v, const VectorField& w) {
  if (v.jets().independent() != w.jets().independent() ||
      v.jets().dependent() != w.jets().dependent())
    throw InputError("vector fields live on different jet spaces");
  std::vector<Expr> xi, phi;
  for (std::size_t i = 0; i < v.xi().size(); ++i) xi.push_back(v.xi()[i] + w.xi()[i]);
  for (std::size_t a = 0; a < v.phi().size(); ++a) phi.push_back(v.phi()[a] + w.phi()[a]);
  return VectorField(v.jets(), std::move(xi), std::move(phi));
}

VectorField scale(const VectorField& v, const Expr& c) {
  std::vector<Expr> xi, phi;
  for (const auto& e : v.xi()) xi.push_back(c * e);
  for (const auto& e : v.phi()) phi.push_back(c * e);
  return VectorField(v.jets(), std::move(xi), std::move(phi));
}

const Expr& ProlongedField::coefficient(int dependent, const std::vector<int>& counts) const {
  for (const auto& c : coefficients)
    if (c.dependent == dependent && c.counts == counts) return c.value;
  throw InputError("no prolonged coefficient for " +
                   base.jets().jet_name(dependent, counts));
}

Expr ProlongedField::apply(const Expr& f) const {
  if (max_jet_order(f) > order)
    throw JetOrderError("expression " + f.str() + " has jet order above the prolongation order " +
                        std::to_string(order));
  const JetSpace& jets = base.jets();
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < jets.p(); ++i) {
    if (base.xi()[i].is_zero()) continue;
    Expr d = diff(f, jets.independent_symbol(i));
    if (!d.is_zero()) terms.push_back(base.xi()[i] * d);
  }
  for (const auto& c : coefficients) {
    if (c.value.is_zero()) continue;
    Expr d = diff(f, c.jet);
    if (!d.is_zero()) terms.push_back(c.value * d);
  }
  return simplify(add(terms));
}

ProlongedField prolong(const VectorField& v, int n) {
  if (n < 0) throw InputError("prolongation order must be nonnegative");
  const JetSpace jets = v.jets().with_order(n + 1);
  const std::size_t p = jets.p();
  ProlongedField out{v, n, {}};
  for (std::size_t a = 0; a < jets.q(); ++a) {
    const int alpha = static_cast<int>(a);
    std::vector<int> zero(p, 0);
    out.coefficients.push_back({alpha, zero, jets.jet(alpha), v.phi()[a]});
    if (n == 0) continue;
    // Characteristic Q_a = phi_a - sum_i xi_i u^a_i.
    std::vector<Expr> q_terms{v.phi()[a]};
    for (std::size_t i = 0; i < p; ++i) {
      std::vector<int> e(p, 0);
      e[i] = 1;
      q_terms.push_back(-(v.xi()[i] * jets.jet(alpha, e)));
    }
    std::map<std::vector<int>, Expr> dq;
    dq[zero] = simplify(add(q_terms));
    for (const auto& counts : jets.multi_indices(n)) {
      // D_J Q from D_{J - e_i} Q with i the last variable present in J.
      std::size_t i = p;
      while (counts[--i] == 0) {
      }
      std::vector<int> parent = counts;
      --parent[i];
      Expr d = simplify(total_derivative(dq.at(parent), i, jets));
      dq[counts] = d;
      std::vector<Expr> terms{d};
      for (std::size_t k = 0; k < p; ++k) {
        std::vector<int> up = counts;
        ++up[k];
        terms.push_back(v.xi()[k] * jets.jet(alpha, up));
      }
      out.coefficients.push_back({alpha, counts, v.jets().jet(alpha, counts), clean(add(terms), n)});
    }
  }
  return out;
}

}  // namespace genlie
