#include "genlie/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "genlie/calculus.hpp"
#include "genlie/error.hpp"
#include "genlie/quadrature.hpp"
#include "genlie/simplify.hpp"

namespace genlie {

namespace {

using Matrix = std::vector<std::vector<Expr>>;

Expr det2(const Expr& a, const Expr& b, const Expr& c, const Expr& d) { return a * d - b * c; }

// Inverse of a symbolic p x p matrix, p <= 3 or diagonal.
Matrix inverse(const Matrix& m) {
  const std::size_t p = m.size();
  bool diagonal = true;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (i != j && !m[i][j].is_zero()) diagonal = false;
  Matrix out(p, std::vector<Expr>(p, Expr(0)));
  if (diagonal) {
    for (std::size_t i = 0; i < p; ++i) out[i][i] = simplify(Expr(1) / m[i][i]);
    return out;
  }
  if (p == 2) {
    Expr det = simplify(det2(m[0][0], m[0][1], m[1][0], m[1][1]));
    out[0][0] = simplify(m[1][1] / det);
    out[0][1] = simplify(-m[0][1] / det);
    out[1][0] = simplify(-m[1][0] / det);
    out[1][1] = simplify(m[0][0] / det);
    return out;
  }
  if (p == 3) {
    auto minor = [&](std::size_t r, std::size_t c) {
      std::size_t r0 = r == 0 ? 1 : 0, r1 = r == 2 ? 1 : 2;
      std::size_t c0 = c == 0 ? 1 : 0, c1 = c == 2 ? 1 : 2;
      return det2(m[r0][c0], m[r0][c1], m[r1][c0], m[r1][c1]);
    };
    Expr det = simplify(m[0][0] * minor(0, 0) - m[0][1] * minor(0, 1) + m[0][2] * minor(0, 2));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        Expr cof = ((i + j) % 2 == 0 ? Expr(1) : Expr(-1)) * minor(j, i);
        out[i][j] = simplify(cof / det);
      }
    return out;
  }
  throw InputError("prolonged actions need p <= 3 or a diagonal base Jacobian");
}

}  // namespace

ProlongedAction prolong_action(const GroupAction& g, int n) {
  if (!g.projectable()) throw InputError("prolonged action of a non-projectable group");
  const JetSpace jets = g.jets().with_order(std::max(n, 1));
  const std::size_t p = jets.p(), q = jets.q();
  if (g.xi_exprs().size() != p || g.phi_exprs().size() != q)
    throw InputError("prolonged action needs the symbolic components of the group");
  ProlongedAction out;
  out.base = g.xi_exprs();
  Matrix jac(p, std::vector<Expr>(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      jac[i][j] = simplify(diff(g.xi_exprs()[i], jets.independent_symbol(j)));
  Matrix b = inverse(jac);
  for (std::size_t a = 0; a < q; ++a) {
    const int alpha = static_cast<int>(a);
    std::map<std::vector<int>, Expr> values;
    std::vector<int> zero(p, 0);
    values[zero] = g.phi_exprs()[a];
    out.jets.emplace_back(jets.jet(alpha), g.phi_exprs()[a]);
    for (const auto& counts : jets.multi_indices(n)) {
      std::size_t i = p;
      while (counts[--i] == 0) {
      }
      std::vector<int> parent = counts;
      --parent[i];
      const Expr& w = values.at(parent);
      std::vector<Expr> terms;
      for (std::size_t j = 0; j < p; ++j) {
        if (b[j][i].is_zero()) continue;
        terms.push_back(b[j][i] * total_derivative(w, j, jets));
      }
      Expr v = simplify(add(terms));
      values[counts] = v;
      out.jets.emplace_back(jets.jet(alpha, counts), v);
    }
  }
  return out;
}

FactorizationReport factorization_check(const DifferentialSystem& sys, const GroupAction& g,
                                        double eta, const FactorizationOptions& options,
                                        std::optional<Expr> q_closed_form) {
  if (options.equation >= sys.size()) throw InputError("factorization check: no such equation");
  const Expr& delta = sys.equations()[options.equation];
  const int n = sys.order();
  ProlongedAction pa = prolong_action(g, n);

  Rules rules;
  const JetSpace& jets = sys.jets();
  for (std::size_t i = 0; i < jets.p(); ++i) rules[jets.independent()[i]] = pa.base[i];
  for (const auto& [z, v] : pa.jets) rules[z.name()] = v;
  Expr left = change_variables(delta, rules);

  FactorizationReport rep;
  rep.coordinates = jets.coordinates(n);
  std::vector<std::string> vars;
  for (const auto& z : rep.coordinates) vars.push_back(z.name());
  vars.push_back("eta");
  vars.push_back("eps");
  const FunctionRegistry* reg = options.registry.get();
  CompiledExpr left_c(left, vars, reg);
  CompiledExpr delta_c(delta, vars, reg);

  std::optional<CompiledExpr> q_c, dleft_c, psi_c;
  std::size_t k_index = 0;
  double c = 1.0;
  if (q_closed_form) {
    q_c.emplace(*q_closed_form, vars, reg);
    rep.q_source = q_closed_form->str();
  } else {
    const auto& solved = sys.solved(options.equation);
    if (!solved || solved->power != 1)
      throw InputError("factorization check without a closed-form factor needs a linear solved form");
    if (!solved->coefficient.is_number() || solved->coefficient.is_zero())
      throw InputError("solved form coefficient must be a nonzero constant");
    c = solved->coefficient.number().value();
    auto it = std::find(rep.coordinates.begin(), rep.coordinates.end(), solved->variable);
    if (it == rep.coordinates.end()) throw InputError("solved variable is not a jet coordinate");
    k_index = static_cast<std::size_t>(it - rep.coordinates.begin());
    dleft_c.emplace(diff(left, solved->variable), vars, reg);
    psi_c.emplace(solved->value, vars, reg);
    rep.q_source = "line integral";
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> d(-options.range, options.range);
  const GaussRule& gl = gauss_legendre(64);
  std::vector<double> z(vars.size());
  for (int s = 0; s < options.samples; ++s) {
    for (std::size_t i = 0; i < rep.coordinates.size(); ++i) z[i] = d(rng);
    z[vars.size() - 2] = eta;
    z[vars.size() - 1] = options.eps;
    try {
      double l = left_c(z);
      double del = delta_c(z);
      double qv = 0.0;
      if (q_c) {
        qv = (*q_c)(z);
      } else {
        const double zk = z[k_index];
        const double psi = (*psi_c)(z);
        std::vector<double> w = z;
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
          double tau = 0.5 * (gl.nodes[j] + 1.0);
          w[k_index] = tau * zk + (1.0 - tau) * psi;
          qv += 0.5 * gl.weights[j] * (*dleft_c)(w);
        }
        qv /= c;
      }
      double r = qv * del;
      double scale = std::max(std::abs(l), std::abs(r));
      double err = scale < 1e-14 ? 0.0 : std::abs(l - r) / scale;
      rep.points.emplace_back(z.begin(), z.begin() + static_cast<long>(rep.coordinates.size()));
      rep.left.push_back(l);
      rep.right.push_back(r);
      rep.q.push_back(qv);
      rep.max_rel_error = std::max(rep.max_rel_error, err);
    } catch (const DomainError&) {
      ++rep.skipped;
    }
  }
  rep.pass = !rep.points.empty() && rep.max_rel_error <= options.tol;
  return rep;
}

}  // namespace genlie
