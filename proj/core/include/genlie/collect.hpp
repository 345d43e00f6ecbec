#pragma once

#include <utility>
#include <vector>

#include "genlie/expr.hpp"

namespace genlie {

// Coefficients of an expression viewed as a polynomial in the jet variables
// of order >= min_order; lower-order jets stay inside the coefficients.
struct JetPolynomial {
  std::vector<std::pair<Expr, Expr>> terms;  // (monomial, coefficient); monomial 1 = free term
  bool polynomial = true;  // false when a split jet occurs non-polynomially
};

JetPolynomial collect_jets(const Expr& e, int min_order = 1);

}  // namespace genlie
