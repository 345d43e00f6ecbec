#include "genlie/eval.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "genlie/calculus.hpp"
#include "genlie/error.hpp"

namespace genlie {
namespace {

std::string display_name(const std::string& name, std::span<const int> orders) {
  std::ostringstream os;
  os << name;
  bool any = false;
  for (int o : orders) any = any || o != 0;
  if (any) {
    os << "'[";
    for (std::size_t i = 0; i < orders.size(); ++i) os << (i ? "," : "") << orders[i];
    os << ']';
  }
  return os.str();
}

bool all_zero(std::span<const int> orders) {
  for (int o : orders)
    if (o != 0) return false;
  return true;
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

double eval_pow(double b, double x) {
  if (b == 0.0 && x < 0.0) throw DomainError("division by zero");
  if (b < 0.0 && std::floor(x) != x) throw DomainError("negative base with non-integer exponent");
  return checked(std::pow(b, x), "power");
}

}  // namespace

double eval_fn(Fn fn, double x) {
  switch (fn) {
    case Fn::Exp:
      return checked(std::exp(x), "exp");
    case Fn::Log:
      if (!(x > 0.0)) throw DomainError("log of non-positive argument");
      return std::log(x);
    case Fn::Sin:
      return std::sin(x);
    case Fn::Cos:
      return std::cos(x);
    case Fn::Tanh:
      return std::tanh(x);
    case Fn::Artanh:
      if (!(std::fabs(x) < 1.0)) throw DomainError("artanh argument outside (-1,1)");
      return std::atanh(x);
    case Fn::Sinh:
      return checked(std::sinh(x), "sinh");
    case Fn::Cosh:
      return checked(std::cosh(x), "cosh");
    case Fn::Arsinh:
      return std::asinh(x);
    case Fn::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(x);
    case Fn::Abs:
      return std::fabs(x);
    case Fn::Sign:
      return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

void FunctionRegistry::add(const std::string& name, std::vector<int> orders, FunctionEvaluator f) {
  direct_[{name, std::move(orders)}] = std::move(f);
}

void FunctionRegistry::define(const std::string& name, std::vector<std::string> params, Expr body) {
  defined_[name] = {std::move(params), std::move(body)};
}

bool FunctionRegistry::has(const std::string& name, std::span<const int> orders) const {
  std::vector<int> o(orders.begin(), orders.end());
  if (direct_.count(Key{name, o})) return true;
  if (all_zero(orders) && direct_.count(Key{name, {}})) return true;
  return defined_.count(name) > 0;
}

const FunctionEvaluator& FunctionRegistry::lookup(const std::string& name,
                                                  std::span<const int> orders) const {
  std::vector<int> o(orders.begin(), orders.end());
  if (auto it = direct_.find(Key{name, o}); it != direct_.end()) return it->second;
  if (all_zero(orders)) {
    if (auto it = direct_.find(Key{name, {}}); it != direct_.end()) return it->second;
  }
  auto def = defined_.find(name);
  if (def == defined_.end()) throw UnboundVariableError(display_name(name, orders));
  std::lock_guard<std::mutex> lock(*mutex_);
  if (auto it = derived_.find(Key{name, o}); it != derived_.end()) return it->second;
  const Definition& d = def->second;
  if (d.params.size() != o.size()) {
    throw InputError("function '" + name + "' called with the wrong number of arguments");
  }
  Expr body = d.body;
  for (std::size_t i = 0; i < o.size(); ++i) body = diff(body, d.params[i], o[i]);
  std::vector<std::string> vars = d.params;
  vars.push_back("eps");
  auto compiled = std::make_shared<CompiledExpr>(body, vars, this);
  FunctionEvaluator f = [compiled, n = d.params.size()](std::span<const double> args, double eps) {
    std::vector<double> v(args.begin(), args.end());
    v.resize(n);
    v.push_back(eps);
    return (*compiled)(v);
  };
  return derived_.emplace(Key{name, o}, std::move(f)).first->second;
}

// ---------------------------------------------------------------------------

namespace {

double eval_rec(const Expr& e, const Bindings& b, const FunctionRegistry* reg) {
  switch (e.kind()) {
    case Kind::Number:
      return e.number().value();
    case Kind::Symbol: {
      auto it = b.find(e.name());
      if (it == b.end()) throw UnboundVariableError(e.name());
      return it->second;
    }
    case Kind::Add: {
      double s = 0.0;
      for (const Expr& a : e.args()) s += eval_rec(a, b, reg);
      return checked(s, "sum");
    }
    case Kind::Mul: {
      double p = 1.0;
      for (const Expr& a : e.args()) p *= eval_rec(a, b, reg);
      return checked(p, "product");
    }
    case Kind::Pow:
      return eval_pow(eval_rec(e.arg(0), b, reg), eval_rec(e.arg(1), b, reg));
    case Kind::Func:
      return eval_fn(e.fn(), eval_rec(e.arg(0), b, reg));
    case Kind::Apply: {
      if (reg == nullptr) throw UnboundVariableError(display_name(e.name(), e.orders()));
      const auto& f = reg->lookup(e.name(), e.orders());
      std::vector<double> args;
      for (const Expr& a : e.args()) args.push_back(eval_rec(a, b, reg));
      auto eps = b.find("eps");
      double ev = eps == b.end() ? std::numeric_limits<double>::quiet_NaN() : eps->second;
      return checked(f(args, ev), e.name().c_str());
    }
  }
  return 0.0;
}

}  // namespace

double evaluate(const Expr& e, const Bindings& b, const FunctionRegistry* registry) {
  return eval_rec(e, b, registry);
}

// ---------------------------------------------------------------------------

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& variables,
                           const FunctionRegistry* registry)
    : arity_(variables.size()) {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == "eps") eps_slot_ = static_cast<int>(i);
  }
  emit(e, variables, registry, 1);
}

void CompiledExpr::emit(const Expr& e, const std::vector<std::string>& variables,
                        const FunctionRegistry* registry, std::size_t depth) {
  max_stack_ = std::max(max_stack_, depth);
  switch (e.kind()) {
    case Kind::Number:
      code_.push_back({Op::Const, 0, e.number().value(), 0});
      return;
    case Kind::Symbol: {
      for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i] == e.name()) {
          code_.push_back({Op::Var, 0, 0.0, static_cast<std::uint32_t>(i)});
          return;
        }
      }
      throw UnboundVariableError(e.name());
    }
    case Kind::Add:
    case Kind::Mul: {
      std::size_t k = 0;
      for (const Expr& a : e.args()) emit(a, variables, registry, depth + k++);
      code_.push_back({e.kind() == Kind::Add ? Op::Add : Op::Mul,
                       static_cast<std::uint32_t>(e.args().size()), 0.0, 0});
      return;
    }
    case Kind::Pow: {
      const Expr& x = e.arg(1);
      if (x.is_number() && x.number().is_integer() && std::fabs(x.number().value()) <= 64) {
        emit(e.arg(0), variables, registry, depth);
        code_.push_back({Op::IntPow, 0, x.number().value(), 0});
        return;
      }
      emit(e.arg(0), variables, registry, depth);
      emit(x, variables, registry, depth + 1);
      code_.push_back({Op::Pow, 0, 0.0, 0});
      return;
    }
    case Kind::Func:
      emit(e.arg(0), variables, registry, depth);
      code_.push_back({Op::Func, 0, 0.0, static_cast<std::uint32_t>(e.fn())});
      return;
    case Kind::Apply: {
      if (registry == nullptr) throw UnboundVariableError(display_name(e.name(), e.orders()));
      functions_.push_back(registry->lookup(e.name(), e.orders()));
      std::size_t slot = functions_.size() - 1;
      std::size_t k = 0;
      for (const Expr& a : e.args()) emit(a, variables, registry, depth + k++);
      code_.push_back({Op::Apply, static_cast<std::uint32_t>(e.args().size()), 0.0,
                       static_cast<std::uint32_t>(slot)});
      return;
    }
  }
}

double CompiledExpr::operator()(std::span<const double> values) const {
  if (values.size() < arity_) throw InputError("compiled expression: too few values");
  std::vector<double> stack;
  stack.reserve(max_stack_ + 1);
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const:
        stack.push_back(in.value);
        break;
      case Op::Var:
        stack.push_back(values[in.index]);
        break;
      case Op::Add: {
        double s = 0.0;
        for (std::size_t i = stack.size() - in.count; i < stack.size(); ++i) s += stack[i];
        stack.resize(stack.size() - in.count);
        stack.push_back(checked(s, "sum"));
        break;
      }
      case Op::Mul: {
        double p = 1.0;
        for (std::size_t i = stack.size() - in.count; i < stack.size(); ++i) p *= stack[i];
        stack.resize(stack.size() - in.count);
        stack.push_back(checked(p, "product"));
        break;
      }
      case Op::IntPow: {
        double b = stack.back();
        int n = static_cast<int>(in.value);
        if (b == 0.0 && n < 0) throw DomainError("division by zero");
        double r = 1.0;
        for (int k = 0; k < std::abs(n); ++k) r *= b;
        stack.back() = checked(n < 0 ? 1.0 / r : r, "power");
        break;
      }
      case Op::Pow: {
        double x = stack.back();
        stack.pop_back();
        stack.back() = eval_pow(stack.back(), x);
        break;
      }
      case Op::Func:
        stack.back() = eval_fn(static_cast<Fn>(in.index), stack.back());
        break;
      case Op::Apply: {
        std::span<const double> args(stack.data() + stack.size() - in.count, in.count);
        double eps = eps_slot_ >= 0 ? values[static_cast<std::size_t>(eps_slot_)]
                                    : std::numeric_limits<double>::quiet_NaN();
        double r = checked(functions_[in.index](args, eps), "function application");
        stack.resize(stack.size() - in.count);
        stack.push_back(r);
        break;
      }
    }
  }
  return stack.back();
}

// ---------------------------------------------------------------------------

namespace {

struct ApplyReplacer {
  std::map<Expr, std::string, ExprLess> names;

  Expr operator()(const Expr& e) {
    if (e.kind() == Kind::Apply) {
      auto it = names.find(e);
      if (it == names.end()) {
        it = names.emplace(e, "__f" + std::to_string(names.size())).first;
      }
      return symbol(it->second);
    }
    if (e.args().empty()) return e;
    std::vector<Expr> args;
    for (const Expr& a : e.args()) args.push_back((*this)(a));
    switch (e.kind()) {
      case Kind::Add:
        return add(std::move(args));
      case Kind::Mul:
        return mul(std::move(args));
      case Kind::Pow:
        return power(args[0], args[1]);
      case Kind::Func:
        return func(e.fn(), args[0]);
      default:
        return e;
    }
  }
};

}  // namespace

SamplingComparison compare_by_sampling(const Expr& a, const Expr& b, int samples,
                                       std::uint64_t seed, double tol, bool up_to_factor) {
  ApplyReplacer rep;
  Expr ra = rep(a);
  Expr rb = rep(b);
  ExprSet vars = free_symbols(ra);
  for (const Expr& s : free_symbols(rb)) vars.insert(s);
  std::vector<std::string> names;
  for (const Expr& s : vars) names.push_back(s.name());
  CompiledExpr ca(ra, names);
  CompiledExpr cb(rb, names);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.9, 0.9);
  std::vector<double> va, vb;
  int attempts = 0;
  while (static_cast<int>(va.size()) < samples && attempts < samples * 20) {
    ++attempts;
    std::vector<double> x(names.size());
    for (double& v : x) v = dist(rng);
    try {
      double ya = ca(x);
      double yb = cb(x);
      va.push_back(ya);
      vb.push_back(yb);
    } catch (const DomainError&) {
    }
  }
  SamplingComparison out;
  out.samples_used = static_cast<int>(va.size());
  if (va.empty()) return out;
  bool zero_b = false;
  if (up_to_factor) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
      num += va[i] * vb[i];
      den += vb[i] * vb[i];
    }
    out.factor = den > 0.0 ? num / den : 0.0;
    zero_b = den == 0.0;
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    scale = std::max({scale, std::fabs(va[i]), std::fabs(out.factor * vb[i])});
  }
  scale = std::max(scale, 1.0);
  for (std::size_t i = 0; i < va.size(); ++i) {
    out.max_error = std::max(out.max_error, std::fabs(va[i] - out.factor * vb[i]) / scale);
  }
  bool degenerate = up_to_factor && out.factor == 0.0 && !zero_b;
  out.equivalent = !degenerate && out.samples_used >= samples / 2 && out.max_error <= tol;
  return out;
}

}  // namespace genlie
