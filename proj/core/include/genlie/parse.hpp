#pragma once

#include <string_view>

#include "genlie/context.hpp"
#include "genlie/expr.hpp"

namespace genlie {

// Parses the infix grammar documented in docs/grammar.md and returns the
// simplified (canonical) expression. Throws ParseError.
Expr parse(std::string_view text, const Context& context = Context::standard());

// Parse without the final simplification pass.
Expr parse_raw(std::string_view text, const Context& context = Context::standard());

}  // namespace genlie
