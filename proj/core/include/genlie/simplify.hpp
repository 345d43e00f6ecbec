#pragma once

#include <utility>

#include "genlie/expr.hpp"

namespace genlie {

// Canonical form: constants folded, sums and products flattened and sorted,
// like terms and like powers merged, inverse pairs collapsed. Two expressions
// that simplify to the same tree are equal; the converse does not hold.
Expr simplify(const Expr& e);

// simplify() after distributing products over sums and expanding positive
// integer powers of sums.
Expr expand(const Expr& e);

// Splits a simplified term into numeric coefficient and remaining factor:
// 3*x*y -> (3, x*y), x -> (1, x), 5 -> (5, 1).
std::pair<Number, Expr> split_coefficient(const Expr& term);

}  // namespace genlie
