#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "genlie/estimate.hpp"
#include "genlie/genfunc.hpp"
#include "genlie/quadrature.hpp"

namespace genlie {

// Smooth test function given by an expression, supported in `support`.
class TestFunction {
 public:
  TestFunction(Expr psi, std::vector<std::string> variables, Box support, std::string name = {});

  const Expr& expr() const { return expr_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const Box& support() const { return support_; }
  const std::string& name() const { return name_; }
  std::size_t dim() const { return variables_.size(); }

  double operator()(std::span<const double> x) const;
  // Symbolic partial derivative of the given multi-index.
  TestFunction partial(const std::vector<int>& alpha) const;
  // int |psi| and sup |psi| by quadrature / sampling.
  double l1_norm() const;
  double sup_norm() const;

 private:
  Expr expr_;
  std::vector<std::string> variables_;
  Box support_;
  std::string name_;
  std::shared_ptr<const CompiledExpr> compiled_;
};

// Product bump prod_i b((x_i - c_i)/r_i) * (1 + sum_i a_i (x_i - c_i)), with
// b(s) = exp(-1/(1-s^2)) and support prod [c_i - r_i, c_i + r_i].
TestFunction bump_test_function(std::vector<std::string> variables, std::vector<double> center,
                                std::vector<double> radius, std::vector<double> tilt = {},
                                std::string name = {});

// delta^(order) concentrated on the hyperplane normal . x = offset, with a
// coefficient that may vary along it (expression in the variables).
struct DeltaAtom {
  Hyperplane locus;
  int order = 0;
  Expr coefficient = Expr(1);
};

// Finite combination of delta-derivative atoms plus a piecewise smooth
// regular part. The regular part's discontinuities must be listed as kinks.
struct DistributionDescriptor {
  std::vector<DeltaAtom> atoms;
  std::function<double(std::span<const double>)> regular;  // empty: no regular part
  std::vector<Hyperplane> kinks;
  std::string description;
};

// Exact (atom evaluation) plus quadrature (regular part) pairing.
double descriptor_pairing(const DistributionDescriptor& d, const TestFunction& psi);
// <|d|, |psi|>: magnitude scale for association tolerances.
double descriptor_magnitude(const DistributionDescriptor& d, const TestFunction& psi);

struct PairingOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_intervals = 4000;
  // Extra breakpoints at distance sqrt(eps) from every locus, for
  // representatives built from a rapidly decreasing mollifier.
  bool split_sqrt_eps = false;
  int jobs = 1;
};

struct PairingValue {
  double value = 0.0;
  bool converged = true;
};

PairingValue weak_pairing(const GenFunc& f, const TestFunction& psi, double eps,
                          const PairingOptions& options = {});

struct PairingTrace {
  std::vector<double> eps;
  std::vector<double> values;
  double limit = 0.0;
  double order = 0.0;  // fitted s in P(eps) - limit ~ eps^s; 0 when not fitted
  bool extrapolated = false;
  bool diverges = false;
  double growth_exponent = 0.0;  // slope of log|P| against log(1/eps) over the tail
  bool quadrature_warning = false;
};

// Extrapolated limit, divergence flag and growth exponent of a table.
PairingTrace analyze_trace(std::vector<double> eps, std::vector<double> values);

PairingTrace pairing_trace(const GenFunc& f, const TestFunction& psi, const EpsLadder& ladder,
                           const PairingOptions& options = {});

struct AssociationEntry {
  std::string test_function;
  PairingTrace trace;
  double expected = 0.0;
  double scale = 0.0;
  double error = 0.0;
  bool pass = false;
};

struct AssociationReport {
  std::vector<AssociationEntry> entries;
  bool pass = false;
  std::string reason;
  double tol = 0.0;
};

// Passes iff every |limit - <d,psi>| < tol * <|d|,|psi|> (the scale falls
// back to int |psi| when d pairs to zero magnitude) and no trace diverges.
AssociationReport association_check(const GenFunc& f, const DistributionDescriptor& d,
                                    const std::vector<TestFunction>& battery,
                                    const EpsLadder& ladder, double tol = 1e-2,
                                    const PairingOptions& options = {});

struct DeltaCoefficientResult {
  std::vector<double> coefficients;  // [constant, delta, delta', ...]
  double condition = 0.0;
  double residual = 0.0;
  std::vector<PairingTrace> traces;
};

// Least-squares fit of the limit pairings of f against a battery
// concentrated near `locus` by the basis {1, delta, delta', ...,
// delta^(max_order)} on the locus. Throws ComputationError when the battery
// is ill-conditioned (condition number > 1e6).
DeltaCoefficientResult identify_delta_coefficient(const GenFunc& f, const Hyperplane& locus,
                                                  const EpsLadder& ladder, int max_order,
                                                  const std::vector<TestFunction>& battery,
                                                  const PairingOptions& options = {});

// Five bumps around `center` with the given radii, shifted and tilted along
// the locus normal, in the variables x (1D) or x, t (2D).
std::vector<TestFunction> locus_battery(const Hyperplane& locus, std::vector<double> center,
                                        std::vector<double> radius);

}  // namespace genlie
