#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "genlie/number.hpp"

namespace genlie {

enum class Kind { Number, Symbol, Add, Mul, Pow, Func, Apply };

// Catalog of elementary functions. Abs and Sign are non-smooth: they may be
// evaluated but not differentiated.
enum class Fn { Exp, Log, Sin, Cos, Tanh, Artanh, Sinh, Cosh, Arsinh, Sqrt, Abs, Sign };

const char* fn_name(Fn fn);
bool fn_from_name(const std::string& name, Fn& out);
bool fn_is_smooth(Fn fn);

struct Node;

// Immutable expression tree with value semantics (shared structure).
//
// Symbols are either plain variables (x, t, eta, eps, ...) or jet variables
// u^alpha_J, which additionally carry the dependent index alpha and the
// multi-index J as counts per independent variable. Apply nodes are opaque
// user functions F(args) with formal partial-derivative orders per argument.
class Expr {
 public:
  Expr();  // the exact constant 0
  Expr(Number value);  // NOLINT: implicit by intent
  Expr(int value) : Expr(Number(value)) {}  // NOLINT
  Expr(double value) : Expr(Number::real(value)) {}  // NOLINT

  Kind kind() const;
  const Number& number() const;  // Kind::Number
  const std::string& name() const;  // Symbol, Apply
  Fn fn() const;  // Func
  int dependent() const;  // jet symbols: alpha, otherwise -1
  std::span<const int> orders() const;  // jet multi-index counts / Apply derivative orders
  std::span<const Expr> args() const;  // operands
  const Expr& arg(std::size_t i) const { return args()[i]; }
  std::span<const std::string> params() const;  // Apply: declared parameter names
  const std::string& inverse() const;  // Apply: declared inverse function ("" if none)

  bool is_number() const { return kind() == Kind::Number; }
  bool is_symbol() const { return kind() == Kind::Symbol; }
  bool is_jet() const { return is_symbol() && dependent() >= 0; }
  bool is_zero() const { return is_number() && number().is_zero(); }
  bool is_one() const { return is_number() && number().is_one(); }
  int jet_order() const;  // |J| for jet symbols, 0 otherwise

  std::size_t hash() const;
  const Node* node() const { return node_.get(); }

  std::string str() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
  friend bool operator<(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_node(Node&& node);
};

// Structural total order: -1, 0, +1.
int compare(const Expr& a, const Expr& b);

// Raw constructors. They do not simplify; call simplify() for canonical form.
Expr symbol(const std::string& name);
Expr jet_symbol(const std::string& name, int dependent, std::vector<int> orders);
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr power(const Expr& base, const Expr& exponent);
Expr func(Fn fn, const Expr& arg);
Expr apply(const std::string& name, std::vector<std::string> params, std::vector<int> orders,
           std::vector<Expr> args, std::string inverse = {});

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};
using ExprSet = std::set<Expr, ExprLess>;

// All symbols (plain and jet) occurring in e.
ExprSet free_symbols(const Expr& e);
bool depends_on(const Expr& e, const std::string& symbol_name);
bool contains_apply(const Expr& e);
bool contains_nonsmooth(const Expr& e);

std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace genlie
