#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genlie/expr.hpp"

namespace genlie {

// Coordinates of the n-jet space over p independent and q dependent
// variables. Independent variables must be single letters so that jet names
// such as u_xt are unambiguous; multi-indices are symmetric, so u_tx and u_xt
// canonicalize to the same key (letters ordered as declared).
class JetSpace {
 public:
  JetSpace() = default;
  JetSpace(std::vector<std::string> independent, std::vector<std::string> dependent,
           int max_order);

  std::size_t p() const { return independent_.size(); }
  std::size_t q() const { return dependent_.size(); }
  int max_order() const { return max_order_; }
  const std::vector<std::string>& independent() const { return independent_; }
  const std::vector<std::string>& dependent() const { return dependent_; }

  JetSpace with_order(int max_order) const;

  std::string jet_name(int dependent, const std::vector<int>& counts) const;
  Expr jet(int dependent, const std::vector<int>& counts) const;
  Expr jet(int dependent) const { return jet(dependent, std::vector<int>(p(), 0)); }
  // Jet variable named by a list of independent indices (J = (j1, ..., jk)).
  Expr jet_from_indices(int dependent, const std::vector<int>& indices) const;
  Expr independent_symbol(std::size_t i) const;
  int independent_index(const std::string& name) const;  // -1 if absent
  int dependent_index(const std::string& name) const;    // -1 if absent

  // Recognizes "<dep>" and "<dep>_<letters>"; returns (alpha, counts).
  std::optional<std::pair<int, std::vector<int>>> parse_jet(const std::string& name) const;

  // Multi-indices (as counts) with 1 <= |J| <= order, by order then
  // lexicographically in declaration order: u_x, u_t, u_xx, u_xt, u_tt, ...
  std::vector<std::vector<int>> multi_indices(int order) const;

  // Full coordinate list z of M^(order): x_1..x_p, then per dependent
  // variable u, u_J in multi_indices order.
  std::vector<Expr> coordinates(int order) const;

 private:
  std::vector<std::string> independent_;
  std::vector<std::string> dependent_;
  int max_order_ = 1;
};

}  // namespace genlie
