#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "genlie/eval.hpp"
#include "genlie/expr.hpp"
#include "genlie/mollifier.hpp"

namespace genlie {

struct Box {
  std::vector<std::pair<double, double>> ranges;

  static Box interval(double a, double b) { return Box{{{a, b}}}; }
  static Box rect(double ax, double bx, double at, double bt) { return Box{{{ax, bx}, {at, bt}}}; }
  std::size_t dim() const { return ranges.size(); }
  bool contains(const Box& other) const;
  bool contains(std::span<const double> x) const;
};

// Hyperplane normal . x = offset carrying an eps-scale feature of a family.
struct Hyperplane {
  std::vector<double> normal;
  double offset = 0.0;
};

// Bounds on compact sets (G), polynomial bounds at infinity (G_tau), or
// G-bounds in some variables and G_tau-bounds in the rest.
enum class GrowthClass { Local, Tempered, Mixed };
const char* growth_class_name(GrowthClass c);

// eps_k = eps0 * ratio^k, k = 0..K.
struct EpsLadder {
  double eps0 = 0.5;
  double ratio = 0.5;
  int K = 20;

  std::size_t size() const { return static_cast<std::size_t>(K) + 1; }
  double operator[](std::size_t k) const;
  std::vector<double> values() const;
};

// Smooth function of one variable (possibly eps-dependent) that is slowly
// increasing, usable as the outer function of a composition.
class SmoothMap {
 public:
  using Fn = std::function<double(double y, double eps, int k)>;  // k-th derivative

  SmoothMap(std::string name, Fn f, int exact_orders, bool slowly_increasing = true);

  static SmoothMap identity();
  static SmoothMap tanh_map();
  static SmoothMap sin_map();
  // y -> arsinh(e^a sinh y), evaluated without overflow for large a and |y|.
  static SmoothMap arsinh_scaled_sinh(double a);
  // y -> eps * arsinh(e^{eta/eps} sinh(y/eps)).
  static SmoothMap eps_arsinh_scaled_sinh(double eta);
  // Expression in the symbol y (and optionally eps).
  static SmoothMap from_expr(const Expr& e, std::string name = "");

  const std::string& name() const { return name_; }
  bool slowly_increasing() const { return slowly_increasing_; }
  double operator()(double y, double eps) const { return derivative(0, y, eps); }
  // Orders beyond the exact ones use central differences of the highest
  // exact order.
  double derivative(int k, double y, double eps) const;

 private:
  std::string name_;
  Fn f_;
  int exact_orders_ = 0;
  bool slowly_increasing_ = true;
};

double arsinh_scaled_sinh(double a, double y);

// Colombeau representative (u_eps): an evaluator (x, eps) -> value with
// domain, growth class, singular loci and a derivative factory.
class GenFunc {
 public:
  using Evaluator = std::function<double(std::span<const double> x, double eps)>;
  using Partial = std::function<GenFunc(std::size_t var)>;

  GenFunc() = default;
  GenFunc(std::size_t arity, Evaluator f, Box domain, GrowthClass cls = GrowthClass::Local,
          std::string provenance = {});

  // Expression in `variables` and optionally eps; derivatives are symbolic.
  static GenFunc from_expr(const Expr& e, std::vector<std::string> variables, Box domain,
                           GrowthClass cls = GrowthClass::Local,
                           std::shared_ptr<const FunctionRegistry> registry = nullptr,
                           std::string provenance = {});
  static GenFunc constant(double c, Box domain);
  // coeff * eps^p, constant in x.
  static GenFunc eps_power(double p, double coeff, Box domain);

  std::size_t arity() const { return arity_; }
  const Box& domain() const { return domain_; }
  GrowthClass growth() const { return class_; }
  const std::string& provenance() const { return provenance_; }
  const std::vector<Hyperplane>& loci() const { return loci_; }
  const std::optional<Expr>& expr() const { return expr_; }
  const std::vector<std::string>& variables() const { return variables_; }
  bool valid() const { return static_cast<bool>(f_); }

  double operator()(std::span<const double> x, double eps) const { return f_(x, eps); }
  double operator()(double x, double eps) const;
  double operator()(double x, double t, double eps) const;

  // Exact when a derivative factory or expression is attached, otherwise a
  // fourth-order central difference with step eps/8.
  GenFunc partial(std::size_t var, int times = 1) const;
  GenFunc partial(const std::vector<int>& alpha) const;

  GenFunc with_loci(std::vector<Hyperplane> loci) const;
  GenFunc with_partial(Partial p) const;
  GenFunc with_provenance(std::string note) const;
  GenFunc with_class(GrowthClass cls) const;
  GenFunc with_domain(Box domain) const;

 private:
  std::size_t arity_ = 0;
  Evaluator f_;
  Box domain_;
  GrowthClass class_ = GrowthClass::Local;
  std::string provenance_;
  std::vector<Hyperplane> loci_;
  Partial partial_;
  std::optional<Expr> expr_;
  std::vector<std::string> variables_;
  std::shared_ptr<const FunctionRegistry> registry_;

  friend GenFunc add(const GenFunc&, const GenFunc&);
  friend GenFunc mul(const GenFunc&, const GenFunc&);
  friend GenFunc scale(const GenFunc&, double);
};

GenFunc add(const GenFunc& f, const GenFunc& g);
GenFunc sub(const GenFunc& f, const GenFunc& g);
GenFunc mul(const GenFunc& f, const GenFunc& g);
GenFunc scale(const GenFunc& f, double c);
GenFunc derive(const GenFunc& f, std::size_t var = 0);
GenFunc power(const GenFunc& f, int k);

// (x, eps) -> m(g(x, eps), eps). Throws ClassViolation if m is not slowly
// increasing.
GenFunc compose(const SmoothMap& m, const GenFunc& g);
// Composition with a one-variable representative; f must be G_tau.
GenFunc compose(const GenFunc& f, const GenFunc& g);

// x -> f(c . x + offset) for a one-variable f (delta waves in x - lambda t).
GenFunc pullback_linear(const GenFunc& f, std::vector<double> coeffs, double offset, Box domain);
// Extends a one-variable family constantly in extra trailing variables.
GenFunc extend_constant(const GenFunc& f, Box domain);

// eps^{-i-1} rho^{(i)}(x/eps).
GenFunc embed_delta_derivative(int i, const Mollifier& rho, Box domain = Box::interval(-1, 1));
// int_{-inf}^{x/eps} rho; needs the compact bump.
GenFunc embed_heaviside(const Mollifier& rho, Box domain = Box::interval(-2, 2));
// Convolution phi * rho_eps of a smooth expression phi(x).
GenFunc embed_smooth(const Expr& phi, const Mollifier& rho, Box domain = Box::interval(-1, 1));

// Generalized point (x_eps) and generalized number (table on the ladder).
struct GeneralizedPoint {
  std::function<std::vector<double>(double eps)> at;
  bool compactly_supported = true;
};

struct GeneralizedNumber {
  std::vector<double> eps;
  std::vector<double> values;
};

// Throws DomainError when x_eps leaves the domain.
GeneralizedNumber point_value(const GenFunc& f, const GeneralizedPoint& x, const EpsLadder& ladder);
GeneralizedNumber difference(const GeneralizedNumber& a, const GeneralizedNumber& b);

}  // namespace genlie
