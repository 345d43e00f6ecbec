#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "genlie/expr.hpp"

namespace genlie {

using Bindings = std::map<std::string, double>;

// Numeric evaluator for one formal derivative F^(orders) of an opaque
// function. `eps` is the value bound to the symbol "eps" (NaN if unbound), so
// regularized coefficients can depend on the regularization parameter.
using FunctionEvaluator = std::function<double(std::span<const double> args, double eps)>;

class FunctionRegistry {
 public:
  void add(const std::string& name, std::vector<int> orders, FunctionEvaluator f);
  void add(const std::string& name, FunctionEvaluator f) { add(name, {}, std::move(f)); }
  // Symbolic definition; every derivative order becomes available.
  void define(const std::string& name, std::vector<std::string> params, Expr body);

  // Throws UnboundVariableError when no evaluator is available.
  const FunctionEvaluator& lookup(const std::string& name, std::span<const int> orders) const;
  bool has(const std::string& name, std::span<const int> orders) const;

 private:
  struct Definition {
    std::vector<std::string> params;
    Expr body;
  };
  using Key = std::pair<std::string, std::vector<int>>;
  std::map<Key, FunctionEvaluator> direct_;
  std::map<std::string, Definition> defined_;
  mutable std::map<Key, FunctionEvaluator> derived_;
  mutable std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
};

// Throws UnboundVariableError, DomainError (domain exits and non-finite
// results); never returns NaN.
double evaluate(const Expr& e, const Bindings& b, const FunctionRegistry* registry = nullptr);

// Stack-machine form of an expression over a fixed variable order, for hot
// loops. Compilation fails with UnboundVariableError for symbols not listed.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const std::vector<std::string>& variables,
               const FunctionRegistry* registry = nullptr);

  double operator()(std::span<const double> values) const;
  std::size_t arity() const { return arity_; }

 private:
  enum class Op : std::uint8_t { Const, Var, Add, Mul, Pow, IntPow, Func, Apply };
  struct Instr {
    Op op;
    std::uint32_t count = 0;  // operands for Add/Mul/Apply
    double value = 0.0;       // Const, IntPow exponent
    std::uint32_t index = 0;  // Var slot, Func id, Apply evaluator slot
  };
  std::vector<Instr> code_;
  std::vector<FunctionEvaluator> functions_;
  std::size_t arity_ = 0;
  int eps_slot_ = -1;
  std::size_t max_stack_ = 0;

  void emit(const Expr& e, const std::vector<std::string>& variables,
            const FunctionRegistry* registry, std::size_t depth);
};

// Evaluates a catalog function with domain checks.
double eval_fn(Fn fn, double x);

struct SamplingComparison {
  bool equivalent = false;
  double max_error = 0.0;  // max |a - factor*b| relative to max(|a|,|b|,1)
  double factor = 1.0;     // best constant with a ~ factor*b
  int samples_used = 0;
};

// Compares two expressions numerically after replacing every distinct opaque
// function application by a fresh random variable, optionally up to a
// nonzero constant factor. Samples outside a function's domain are skipped.
SamplingComparison compare_by_sampling(const Expr& a, const Expr& b, int samples,
                                       std::uint64_t seed, double tol, bool up_to_factor = false);

}  // namespace genlie
