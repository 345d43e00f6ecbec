#pragma once

#include <optional>
#include <string>
#include <vector>

#include "genlie/jet.hpp"

namespace genlie {

// Declaration of an opaque function symbol such as F(u) or xi(x,t). The
// parameter names define the default argument list: a bare "F" means F(u),
// and "F_u" means the partial derivative with respect to the parameter u
// applied to the default arguments.
struct FunctionDecl {
  std::string name;
  std::vector<std::string> params;
  std::string inverse;  // name of the declared inverse function, if any
};

// Everything the parser needs to interpret identifiers.
struct Context {
  std::optional<JetSpace> jets;
  std::vector<FunctionDecl> functions;

  // Default: opaque F(u) and G(u) with no jet space.
  static Context standard();

  const FunctionDecl* find_function(const std::string& name) const;
  Context& declare(FunctionDecl decl);
  // Declares F and its inverse Finv, both of parameter `param`.
  Context& declare_inverse_pair(const std::string& name, const std::string& inverse_name,
                                const std::string& param = "u");
};

}  // namespace genlie
