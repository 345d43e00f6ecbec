#pragma once

#include <optional>
#include <string>
#include <vector>

#include "genlie/expr.hpp"
#include "genlie/jet.hpp"
#include "genlie/vector_field.hpp"

namespace genlie {

// Delta = c * (z^power - value) with z a jet coordinate and value free of z.
struct SolvedForm {
  Expr variable;
  int power = 1;
  Expr value;
  Expr coefficient = Expr(1);
};

class DifferentialSystem {
 public:
  DifferentialSystem(JetSpace jets, std::vector<Expr> equations);

  const JetSpace& jets() const { return jets_; }
  int order() const { return order_; }
  std::size_t size() const { return equations_.size(); }
  const std::vector<Expr>& equations() const { return equations_; }
  const std::optional<SolvedForm>& solved(std::size_t nu) const { return solved_.at(nu); }
  bool has_solved_form() const;

  // Solves equation nu for variable^power. Throws InputError unless the
  // equation is c * variable^power + R with c a nonzero constant and R free
  // of the variable.
  DifferentialSystem& solve_for(std::size_t nu, const Expr& variable, int power = 1);
  // Installs a user-supplied form after checking Delta - c (z^power - value)
  // simplifies to 0.
  DifferentialSystem& set_solved(std::size_t nu, SolvedForm form);

  // Eliminates every solved variable: z -> value for power 1, and
  // z^m -> value^(m/power) z^(m mod power) on the expanded form otherwise.
  Expr reduce(const Expr& e) const;

 private:
  JetSpace jets_;
  std::vector<Expr> equations_;
  std::vector<std::optional<SolvedForm>> solved_;
  int order_ = 0;
};

// pr^(n) v (Delta_nu) for every equation, with n the system order.
std::vector<Expr> apply_infinitesimal(const VectorField& v, const DifferentialSystem& sys);

struct DeterminingEquations {
  std::vector<Expr> equations;
  // Jet monomial of each equation's coefficient (1 for the free term).
  std::vector<Expr> monomials;
  bool split = true;  // false when some reduced expression was not polynomial in the jets
  std::vector<std::string> warnings;
};

// Applies the ansatz, eliminates the solved variables and collects the
// coefficients of the remaining jet monomials of order >= 1. Throws
// InputError when no solved form is declared.
DeterminingEquations determining_equations(const DifferentialSystem& sys, const VectorField& ansatz);

struct OgthVerdict {
  bool met = false;
  std::size_t k = 0;  // 1-based index into the jet coordinates z
  Expr coordinate;
  Expr c;
  std::string message;
};

// First coordinate z_k, k >= p + 1, with dDelta/dz_k a nonzero constant.
// The system must consist of one equation.
OgthVerdict ogth_criterion(const DifferentialSystem& sys);

}  // namespace genlie
