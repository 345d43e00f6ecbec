#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genlie/eval.hpp"
#include "genlie/expr.hpp"
#include "genlie/group_action.hpp"
#include "genlie/system.hpp"

namespace genlie {

// pr^(n) g_eta of a closed-form projectable group: the transformed base
// point and jets as expressions in eta, eps and the source jet coordinates.
struct ProlongedAction {
  std::vector<Expr> base;
  std::vector<std::pair<Expr, Expr>> jets;  // (jet coordinate, transformed value), |J| <= n
};

// Derivatives of the transformed graph follow from D~ = (dXi/dx)^{-T} D.
// Throws InputError when the group has no symbolic components or is not
// projectable, and when p > 3 with a non-diagonal base Jacobian.
ProlongedAction prolong_action(const GroupAction& g, int n);

struct FactorizationOptions {
  int samples = 50;
  std::uint64_t seed = 7;
  double eps = 0.1;          // value of the symbol eps in the samples
  double range = 0.9;        // jet coordinates drawn from [-range, range]
  double tol = 1e-8;
  std::size_t equation = 0;  // equation index; needs a power-1 solved form for the line integral
  std::shared_ptr<const FunctionRegistry> registry;
};

struct FactorizationReport {
  std::vector<Expr> coordinates;            // names of the sampled coordinates
  std::vector<std::vector<double>> points;  // sampled z
  std::vector<double> left;                 // Delta(pr g_eta z)
  std::vector<double> right;                // Q(z) Delta(z)
  std::vector<double> q;
  std::string q_source;                     // "line integral" or the closed form
  double max_rel_error = 0.0;
  int skipped = 0;                          // samples outside the domain of the expressions
  bool pass = false;
};

// Compares Delta(pr g_eta z) with Q(z) Delta(z) at random jets z. Without a
// closed form, Q(z) = (1/c) int_0^1 df/dz_k(z_k -> s z_k + (1-s) psi(z')) ds
// with f(z) = Delta(pr g_eta z), on a 64-point Gauss-Legendre rule.
FactorizationReport factorization_check(const DifferentialSystem& sys, const GroupAction& g,
                                        double eta, const FactorizationOptions& options = {},
                                        std::optional<Expr> q_closed_form = std::nullopt);

}  // namespace genlie
