#include "genlie/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace genlie::checks {

void add_association(ScenarioReport& r, const std::string& label, const AssociationReport& a,
                     ExpectedSource source) {
  for (const auto& e : a.entries) {
    Verdict v;
    v.name = label + " [" + e.test_function + "]";
    v.source = source;
    v.expected = e.expected;
    v.measured = e.trace.limit;
    v.error = e.error;
    v.tolerance = a.tol;
    v.pass = e.pass;
    if (!e.pass) v.detail = a.reason;
    r.add(std::move(v));
    r.traces.emplace_back(label + " " + e.test_function, e.trace);
  }
}

void add_residual(ScenarioReport& r, const std::string& label, const GenFunc& residual,
                  const Box& box, const ScenarioConfig& config, int q, ExpectedSource source) {
  NegligibilityResult n = negligibility_estimate(residual, box, std::vector<int>(box.dim(), 0),
                                                 config.ladder, q, config.estimate);
  Verdict v;
  v.name = label;
  v.source = source;
  v.expected = q;
  v.measured = n.below_floor ? std::numeric_limits<double>::infinity() : n.slope;
  v.tolerance = config.estimate.tolerance;
  v.pass = n.pass[static_cast<std::size_t>(q - 1)];
  v.detail = n.below_floor ? "residual below the machine-zero floor on the tail"
                           : "negligible to order " + std::to_string(n.largest_q);
  r.add(std::move(v));
  r.residuals.emplace_back(label, std::move(n));
}

void add_equation_matches(ScenarioReport& r, const std::string& label, const std::vector<Expr>& got,
                          const std::vector<std::pair<std::string, Expr>>& displayed,
                          ExpectedSource source, double tol) {
  for (const auto& [name, want] : displayed) {
    double best = std::numeric_limits<double>::infinity();
    double factor = 0.0;
    for (const Expr& e : got) {
      SamplingComparison c = compare_by_sampling(e, want, 100, 1, tol, true);
      if (c.samples_used > 0 && c.max_error < best) {
        best = c.max_error;
        factor = c.factor;
      }
    }
    Verdict v;
    v.name = label + ": " + name;
    v.source = source;
    v.measured = best;
    v.error = best;
    v.tolerance = tol;
    v.pass = best <= tol;
    std::ostringstream d;
    d << "best match up to factor " << factor;
    v.detail = d.str();
    r.add(std::move(v));
  }
}

Verdict compare(const std::string& name, ExpectedSource source, double expected, double measured,
                double tol, bool relative) {
  Verdict v;
  v.name = name;
  v.source = source;
  v.expected = expected;
  v.measured = measured;
  v.error = std::abs(measured - expected);
  if (relative) v.error /= std::max(std::abs(expected), 1e-300);
  v.tolerance = tol;
  v.pass = std::isfinite(measured) && v.error <= tol;
  return v;
}

double max_difference(const GenFunc& f, const GenFunc& g, const Box& box, double eps, int n) {
  const std::size_t d = box.dim();
  std::vector<double> x(d);
  double worst = 0.0;
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= static_cast<std::size_t>(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = 0; k < d; ++k) {
      auto [a, b] = box.ranges[k];
      x[k] = a + (b - a) * static_cast<double>(rem % n) / (n - 1);
      rem /= n;
    }
    worst = std::max(worst, std::abs(f(x, eps) - g(x, eps)));
  }
  return worst;
}

double log_sinh_abs(double y) {
  double a = std::abs(y);
  if (a < 20.0) return std::log(std::sinh(a));
  return a + std::log1p(-std::exp(-2.0 * a)) - std::numbers::ln2;
}

double log_cosh(double y) {
  double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace genlie::checks
