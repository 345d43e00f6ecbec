#pragma once

#include <map>
#include <string>
#include <vector>

#include "genlie/expr.hpp"
#include "genlie/jet.hpp"

namespace genlie {

// Partial derivative with respect to the symbol `v` (plain or jet); all other
// symbols, including other jet variables, are independent coordinates.
// Differentiating abs or sign throws DomainError.
Expr diff(const Expr& e, const Expr& v, int times = 1);
Expr diff(const Expr& e, const std::string& symbol_name, int times = 1);

// Total derivative D_i with respect to the i-th independent variable of
// `jets`. Throws JetOrderError when a jet of order max_order would be raised.
Expr total_derivative(const Expr& e, std::size_t i, const JetSpace& jets);
// D_J for a multi-index given as counts per independent variable.
Expr total_derivative(const Expr& e, const std::vector<int>& counts, const JetSpace& jets);

// Simultaneous substitution of symbols by name. A rule may mention its own
// variable (u -> f(u)); longer cycles (x -> y, y -> x) throw InputError.
using Rules = std::map<std::string, Expr>;
Expr substitute(const Expr& e, const Rules& rules);
Expr substitute_raw(const Expr& e, const Rules& rules);  // without simplify
// Single simultaneous replacement with no acyclicity requirement, for
// coordinate changes that mix variables (x -> c x - s t, t -> -s x + c t).
Expr change_variables(const Expr& e, const Rules& rules);

// Replaces every application of the opaque function `name` (and its formal
// derivatives) by `body`, an expression in the formal parameters `params`.
Expr instantiate(const Expr& e, const std::string& name, const std::vector<std::string>& params,
                 const Expr& body);

}  // namespace genlie
