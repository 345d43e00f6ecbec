#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genlie/estimate.hpp"
#include "genlie/eval.hpp"
#include "genlie/expr.hpp"
#include "genlie/genfunc.hpp"
#include "genlie/jet.hpp"
#include "genlie/vector_field.hpp"

namespace genlie {

// One-parameter group (eta, x, u) -> (Xi_eta(x, u), Phi_eta(x, u)) on the
// base of a jet space. Numeric groups integrate the generating field on
// demand; closed-form groups also carry the expressions in eta, x, u and
// optionally eps.
class GroupAction {
 public:
  enum class Representation { ClosedForm, Numeric };
  // Writes Xi_eta(x, u) into x_out and Phi_eta(x, u) into u_out.
  using Map = std::function<void(double eta, std::span<const double> x, std::span<const double> u,
                                 double eps, std::span<double> x_out, std::span<double> u_out)>;

  GroupAction(JetSpace jets, Map map, Representation rep, bool projectable, std::string description);

  static GroupAction identity(const JetSpace& jets);

  const JetSpace& jets() const { return jets_; }
  std::size_t p() const { return jets_.p(); }
  std::size_t q() const { return jets_.q(); }
  Representation representation() const { return rep_; }
  bool closed_form() const { return rep_ == Representation::ClosedForm; }
  bool projectable() const { return projectable_; }
  const std::string& description() const { return description_; }

  // Symbolic components in the symbols eta, x_i, u^a (and eps).
  const std::vector<Expr>& xi_exprs() const { return xi_exprs_; }
  const std::vector<Expr>& phi_exprs() const { return phi_exprs_; }
  GroupAction with_exprs(std::vector<Expr> xi, std::vector<Expr> phi) const;
  // Xi_eta(x) = M(eta) x for a projectable group; enables transport of loci.
  using LinearBase = std::function<std::vector<double>(double eta)>;  // row-major p x p
  GroupAction with_linear_base(LinearBase matrix) const;
  const LinearBase& linear_base() const { return linear_base_; }

  void apply(double eta, std::span<const double> x, std::span<const double> u, double eps,
             std::span<double> x_out, std::span<double> u_out) const;
  // Projectable only: Xi_eta(x) and its inverse. The inverse is seeded with
  // Xi_{-eta} and refined by Newton steps to a residual below 1e-10.
  std::vector<double> base(double eta, std::span<const double> x, double eps) const;
  std::vector<double> base_inverse(double eta, std::span<const double> x, double eps) const;

 private:
  JetSpace jets_;
  Map map_;
  Representation rep_;
  bool projectable_;
  std::string description_;
  std::vector<Expr> xi_exprs_;
  std::vector<Expr> phi_exprs_;
  LinearBase linear_base_;
};

// Closed-form solution u(eta) = F^{-1}(c eta + F(u0)) of u' = c f(u) with
// F' = 1 / f. The field may be written with f or as c / F'.
struct FlowPrimitive {
  std::string field;          // f; may be empty when only the c / F' form is used
  std::string antiderivative; // F
  std::string inverse;        // F^{-1}
};

struct FlowOptions {
  std::shared_ptr<const FunctionRegistry> registry;
  std::vector<FlowPrimitive> primitives;
  double tol = 1e-10;     // step-halving agreement target
  double accept = 1e-4;   // larger disagreement fails the completeness proxy
  int max_steps = 1 << 16;
};

// exp(eta v): closed form when v matches the catalog (zero, linear base
// xi = A x, fibre components u' = a u + b, k (u^2 - 1), k tanh(u / s) and
// registered primitives), otherwise fourth-order Runge-Kutta with step
// halving. Numeric flows throw ComputationError on blow-up or when two step
// sizes disagree beyond options.accept.
GroupAction flow(const VectorField& v, const FlowOptions& options = {});

struct GroupLawReport {
  int samples = 0;
  double identity_error = 0.0;
  double composition_error = 0.0;
  double identity_tol = 0.0;
  double composition_tol = 0.0;
  int skipped = 0;  // samples outside the action's domain
  bool pass = false;
};

// Identity and composition laws at random (eta1, eta2, x, u) with eta in
// [-1, 1], x in [-1, 1]^p and u in [-0.9, 0.9]^q. Tolerances: 1e-12 / 1e-8
// for closed-form groups, 1e-10 / 1e-5 for numeric ones.
GroupLawReport check_group_law(const GroupAction& g, int samples = 50, std::uint64_t seed = 1,
                               double eps = 0.1);

struct SlowIncrease {
  double degree = 0.0;  // largest local log-log slope of |Phi| against |u|
  bool slowly_increasing = false;
  bool domain_limited = false;  // Phi undefined somewhere on |u| <= 1 / eps
};

// Audits u -> Phi_eta(x, u) for |u| <= 1 / eps at a few base points of the
// box; passes when the fitted degree stays below 12.
SlowIncrease slow_increase(const GroupAction& g, double eta, const Box& box, double eps = 1e-3);

struct ActionResult {
  std::vector<GenFunc> functions;
  SlowIncrease slow;
  std::vector<std::string> warnings;
};

// (Phi_eta o (id x U)) o Xi_eta^{-1}, representative-wise. The result lives
// on `domain` (default: the domain of the first component).
ActionResult apply_action(const std::vector<GenFunc>& u, const GroupAction& g, double eta,
                          std::optional<Box> domain = std::nullopt);

// Generalized vector field X = sum_i X_i d/dx_i on R^n.
struct GeneralizedField {
  std::vector<GenFunc> components;
};

struct AlgsymgPoint {
  std::size_t index = 0;
  bool on_level_set = false;       // F(x_eps) negligible
  bool tangent = false;            // X(F)(x_eps) negligible
  std::optional<bool> invariant;   // F(Phi_eta(x_eps)) negligible for the sampled eta
  double level_slope = 0.0;
  double tangency_slope = 0.0;
};

struct AlgsymgReport {
  std::vector<AlgsymgPoint> points;
  std::vector<std::size_t> skipped;  // points failing the F(x) = 0 precondition
  bool pass = false;
  int q = 0;
};

// Condition (ii) of the invariance criterion for the level set F = 0 with F
// in solved form: at every battery point with F(x_eps) negligible to order
// q, X(F)(x_eps) must be negligible to order q. With an action, condition (i)
// is also sampled at eta in {0.25, 0.5, 1}.
AlgsymgReport algsymg_check(const GenFunc& f, const GeneralizedField& x,
                            const std::vector<GeneralizedPoint>& points, const EpsLadder& ladder,
                            int q = 3, const GroupAction* action = nullptr,
                            const EstimateOptions& options = {});

}  // namespace genlie
