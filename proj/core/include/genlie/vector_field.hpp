#pragma once

#include <string>
#include <utility>
#include <vector>

#include "genlie/expr.hpp"
#include "genlie/jet.hpp"

namespace genlie {

// Point vector field sum_i xi_i d/dx_i + sum_a phi_a d/du^a on the base of a
// jet space. Coefficients are expressions in x, u (order-0 jets), opaque
// functions of those, and optionally the regularization symbol eps, which
// makes the field generalized (one classical field per rung).
class VectorField {
 public:
  VectorField(JetSpace jets, std::vector<Expr> xi, std::vector<Expr> phi);

  static VectorField zero(const JetSpace& jets);

  const JetSpace& jets() const { return jets_; }
  const std::vector<Expr>& xi() const { return xi_; }
  const std::vector<Expr>& phi() const { return phi_; }
  // xi independent of every dependent variable.
  bool projectable() const { return projectable_; }
  bool is_zero() const;
  std::string str() const;

 private:
  JetSpace jets_;
  std::vector<Expr> xi_;
  std::vector<Expr> phi_;
  bool projectable_ = true;
};

VectorField add(const VectorField& v, const VectorField& w);
VectorField scale(const VectorField& v, const Expr& c);

// n-th prolongation: coefficients phi_a^J for every jet u^a_J with |J| <= n
// (J = 0 gives phi_a itself).
struct ProlongedField {
  VectorField base;
  int order = 0;
  struct Coefficient {
    int dependent = 0;
    std::vector<int> counts;
    Expr jet;
    Expr value;
  };
  std::vector<Coefficient> coefficients;

  // Throws InputError when no coefficient exists for the jet.
  const Expr& coefficient(int dependent, const std::vector<int>& counts) const;
  // pr^(n) v applied to f, simplified. Throws JetOrderError if f involves
  // jets of order above n.
  Expr apply(const Expr& f) const;
};

// phi_a^J = D_J(phi_a - sum_i xi_i u^a_i) + sum_i xi_i u^a_{J,i}.
ProlongedField prolong(const VectorField& v, int n);

}  // namespace genlie
