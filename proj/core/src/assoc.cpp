#include "genlie/assoc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "genlie/calculus.hpp"
#include "genlie/error.hpp"
#include "genlie/parallel.hpp"
#include "genlie/simplify.hpp"

namespace genlie {

namespace {

// Relative distance below which a point counts as on the support boundary,
// where a bump test function and all its derivatives are below 1e-300.
constexpr double kBoundaryBand = 1e-3;

bool strictly_inside(const Box& box, std::span<const double> x) {
  for (std::size_t i = 0; i < box.dim(); ++i) {
    auto [a, b] = box.ranges[i];
    double band = kBoundaryBand * (b - a);
    if (!(x[i] > a + band && x[i] < b - band)) return false;
  }
  return true;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

// Breakpoints of a 1D integrand concentrated at `center` with width ~eps.
void add_feature(std::vector<double>& out, double center, double eps, double a, double b,
                 bool sqrt_split) {
  auto f = feature_breakpoints(center, eps, a, b);
  out.insert(out.end(), f.begin(), f.end());
  if (sqrt_split) {
    for (double s : {-1.0, 1.0}) {
      double p = center + s * std::sqrt(eps);
      if (p > a && p < b) out.push_back(p);
    }
  }
}

QuadOptions quad_options(const PairingOptions& o) {
  QuadOptions q;
  q.abs_tol = o.abs_tol;
  q.rel_tol = o.rel_tol;
  q.max_intervals = o.max_intervals;
  return q;
}

// Integral of g over the support of psi with features on the given
// hyperplanes resolved at width eps.
QuadResult integrate_over(const std::function<double(std::span<const double>)>& g, const Box& box,
                          const std::vector<Hyperplane>& loci, double eps,
                          const PairingOptions& options) {
  QuadOptions q = quad_options(options);
  if (box.dim() == 1) {
    auto [a, b] = box.ranges[0];
    std::vector<double> bps;
    for (const auto& h : loci) {
      if (h.normal.size() != 1 || h.normal[0] == 0.0) continue;
      add_feature(bps, h.offset / h.normal[0], eps / std::abs(h.normal[0]), a, b,
                  options.split_sqrt_eps);
    }
    return integrate([&](double x) { return g(std::span<const double>(&x, 1)); }, a, b, bps, q);
  }
  if (box.dim() != 2) throw InputError("pairings support one or two variables");
  auto [ax, bx] = box.ranges[0];
  auto [at, bt] = box.ranges[1];
  std::vector<double> t_bps;
  std::vector<Hyperplane> slanted;
  for (const auto& h : loci) {
    if (h.normal.size() != 2) continue;
    double n = norm(h.normal);
    if (n == 0.0) continue;
    if (std::abs(h.normal[0]) < 1e-14 * n) {
      add_feature(t_bps, h.offset / h.normal[1], eps / std::abs(h.normal[1]), at, bt,
                  options.split_sqrt_eps);
    } else {
      slanted.push_back(h);
    }
  }
  auto x_bps = [&](double t) {
    std::vector<double> out;
    for (const auto& h : slanted)
      add_feature(out, (h.offset - h.normal[1] * t) / h.normal[0], eps / std::abs(h.normal[0]), ax,
                  bx, options.split_sqrt_eps);
    return out;
  };
  return integrate_2d(
      [&](double x, double t) {
        double p[2] = {x, t};
        return g(std::span<const double>(p, 2));
      },
      ax, bx, at, bt, x_bps, t_bps, q);
}

std::vector<std::string> default_names(std::size_t dim) {
  if (dim == 1) return {"x"};
  if (dim == 2) return {"x", "t"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dim; ++i) out.push_back("x" + std::to_string(i + 1));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TestFunction

TestFunction::TestFunction(Expr psi, std::vector<std::string> variables, Box support,
                           std::string name)
    : expr_(simplify(psi)),
      variables_(std::move(variables)),
      support_(std::move(support)),
      name_(std::move(name)) {
  if (variables_.size() != support_.dim())
    throw InputError("test function support dimension does not match its variables");
  if (variables_.empty()) throw InputError("test function needs at least one variable");
  compiled_ = std::make_shared<const CompiledExpr>(expr_, variables_);
  if (name_.empty()) name_ = expr_.str();
}

double TestFunction::operator()(std::span<const double> x) const {
  if (!strictly_inside(support_, x)) return 0.0;
  return (*compiled_)(x);
}

TestFunction TestFunction::partial(const std::vector<int>& alpha) const {
  Expr d = expr_;
  int total = 0;
  for (std::size_t i = 0; i < alpha.size() && i < variables_.size(); ++i) {
    if (alpha[i] > 0) d = diff(d, variables_[i], alpha[i]);
    total += alpha[i];
  }
  std::ostringstream name;
  name << name_;
  if (total > 0) {
    name << "_";
    for (std::size_t i = 0; i < alpha.size() && i < variables_.size(); ++i)
      for (int k = 0; k < alpha[i]; ++k) name << variables_[i];
  }
  return TestFunction(d, variables_, support_, name.str());
}

double TestFunction::l1_norm() const {
  PairingOptions o;
  o.rel_tol = 1e-10;
  return integrate_over([&](std::span<const double> x) { return std::abs((*this)(x)); }, support_,
                        {}, 1.0, o)
      .value;
}

double TestFunction::sup_norm() const {
  const int n = dim() == 1 ? 2001 : 201;
  double best = 0.0;
  std::vector<double> x(dim());
  std::vector<int> idx(dim(), 0);
  while (true) {
    for (std::size_t i = 0; i < dim(); ++i) {
      auto [a, b] = support_.ranges[i];
      x[i] = a + (b - a) * idx[i] / (n - 1);
    }
    best = std::max(best, std::abs((*this)(x)));
    std::size_t k = 0;
    while (k < dim() && ++idx[k] == n) idx[k++] = 0;
    if (k == dim()) break;
  }
  return best;
}

TestFunction bump_test_function(std::vector<std::string> variables, std::vector<double> center,
                                std::vector<double> radius, std::vector<double> tilt,
                                std::string name) {
  const std::size_t d = variables.size();
  if (center.size() != d || radius.size() != d || (!tilt.empty() && tilt.size() != d))
    throw InputError("bump test function: inconsistent dimensions");
  Box support;
  std::vector<Expr> factors;
  std::vector<Expr> linear{Expr(1)};
  for (std::size_t i = 0; i < d; ++i) {
    if (!(radius[i] > 0.0)) throw InputError("bump test function: radius must be positive");
    support.ranges.emplace_back(center[i] - radius[i], center[i] + radius[i]);
    Expr shifted = symbol(variables[i]) - Expr(center[i]);
    Expr s = shifted / Expr(radius[i]);
    factors.push_back(func(Fn::Exp, Expr(-1) / (Expr(1) - s * s)));
    if (!tilt.empty() && tilt[i] != 0.0) linear.push_back(Expr(tilt[i]) * shifted);
  }
  factors.push_back(add(linear));
  return TestFunction(mul(factors), std::move(variables), std::move(support), std::move(name));
}

// ---------------------------------------------------------------------------
// Descriptors

namespace {

// <c(x) delta^(i)(n.x - o), psi> and the analogous magnitude with |.|.
double atom_pairing(const DeltaAtom& atom, const TestFunction& psi, bool magnitude) {
  const std::size_t d = psi.dim();
  if (atom.locus.normal.size() != d)
    throw InputError("delta atom dimension does not match the test function");
  if (atom.order < 0) throw InputError("delta atom order must be nonnegative");
  // Differentiate along the axis with the largest normal component; the
  // hyperplane is a graph over the remaining variables.
  std::size_t axis = 0;
  for (std::size_t k = 1; k < d; ++k)
    if (std::abs(atom.locus.normal[k]) > std::abs(atom.locus.normal[axis])) axis = k;
  const double a = atom.locus.normal[axis];
  if (a == 0.0) throw InputError("delta atom locus has a zero normal");
  TestFunction phi(atom.coefficient * psi.expr(), psi.variables(), psi.support());
  std::vector<int> alpha(d, 0);
  alpha[axis] = atom.order;
  TestFunction dphi = phi.partial(alpha);
  const double factor =
      (atom.order % 2 == 0 ? 1.0 : -1.0) / (std::abs(a) * std::pow(a, atom.order));
  auto on_locus = [&](std::span<const double> rest) {
    std::vector<double> x(d);
    double s = atom.locus.offset;
    for (std::size_t k = 0, r = 0; k < d; ++k) {
      if (k == axis) continue;
      x[k] = rest[r++];
      s -= atom.locus.normal[k] * x[k];
    }
    x[axis] = s / a;
    double v = dphi(x);
    return magnitude ? std::abs(factor * v) : factor * v;
  };
  if (d == 1) return on_locus({});
  Box rest;
  for (std::size_t k = 0; k < d; ++k)
    if (k != axis) rest.ranges.push_back(psi.support().ranges[k]);
  PairingOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-14;
  return integrate_over(on_locus, rest, {}, 1.0, o).value;
}

double regular_pairing(const DistributionDescriptor& d, const TestFunction& psi, bool magnitude) {
  if (!d.regular) return 0.0;
  PairingOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-14;
  // Kinks are resolved like loci of zero width: breakpoints on the line.
  return integrate_over(
             [&](std::span<const double> x) {
               double v = d.regular(x) * psi(x);
               return magnitude ? std::abs(v) : v;
             },
             psi.support(), d.kinks, 1e-9, o)
      .value;
}

}  // namespace

double descriptor_pairing(const DistributionDescriptor& d, const TestFunction& psi) {
  double s = regular_pairing(d, psi, false);
  for (const auto& atom : d.atoms) s += atom_pairing(atom, psi, false);
  return s;
}

double descriptor_magnitude(const DistributionDescriptor& d, const TestFunction& psi) {
  double s = regular_pairing(d, psi, true);
  for (const auto& atom : d.atoms) s += atom_pairing(atom, psi, true);
  return s;
}

// ---------------------------------------------------------------------------
// Pairings

PairingValue weak_pairing(const GenFunc& f, const TestFunction& psi, double eps,
                          const PairingOptions& options) {
  if (!f.valid()) throw InputError("pairing of an empty generalized function");
  if (f.arity() != psi.dim())
    throw InputError("test function dimension does not match the generalized function");
  if (f.domain().dim() == psi.dim() && !f.domain().contains(psi.support()))
    throw InputError("test function support leaves the domain of the generalized function");
  QuadResult r = integrate_over(
      [&](std::span<const double> x) {
        double p = psi(x);
        return p == 0.0 ? 0.0 : f(x, eps) * p;
      },
      psi.support(), f.loci(), eps, options);
  return {r.value, r.converged};
}

PairingTrace analyze_trace(std::vector<double> eps, std::vector<double> values) {
  PairingTrace tr;
  tr.eps = std::move(eps);
  tr.values = std::move(values);
  const std::size_t n = tr.values.size();
  if (n == 0) return tr;
  const double last = tr.values.back();
  tr.limit = last;

  // Growth of |P| as eps -> 0 over the tail.
  {
    std::vector<double> lx, ly;
    const std::size_t start = n > 8 ? n - 8 : 0;
    for (std::size_t k = start; k < n; ++k) {
      if (std::abs(tr.values[k]) > 0.0 && tr.eps[k] > 0.0) {
        lx.push_back(std::log(1.0 / tr.eps[k]));
        ly.push_back(std::log(std::abs(tr.values[k])));
      }
    }
    if (lx.size() >= 2) tr.growth_exponent = fit_line(lx, ly).slope;
  }

  // Factor-2 growth over the last five rungs, above an absolute noise floor.
  if (n >= 5) {
    double a = std::abs(tr.values[n - 5]);
    double b = std::abs(last);
    tr.diverges = b > 1e-9 && b >= 2.0 * a;
  }
  if (tr.diverges || n < 4) return tr;

  // Aitken/Richardson on the last three rungs; the ratio of successive
  // differences must agree with the preceding triple.
  auto ratio = [&](std::size_t k, double& q) {
    double d1 = tr.values[k - 1] - tr.values[k - 2];
    double d2 = tr.values[k] - tr.values[k - 1];
    double scale = std::max({std::abs(tr.values[k]), std::abs(tr.values[k - 1]), 1e-300});
    if (std::abs(d1) <= 1e-13 * scale) return false;
    q = d2 / d1;
    return true;
  };
  double q = 0.0, q_prev = 0.0;
  if (!ratio(n - 1, q) || !ratio(n - 2, q_prev)) return tr;
  if (!(q > 0.0 && q <= 0.9)) return tr;
  if (std::abs(q - q_prev) > 0.25 * q) return tr;
  const double d2 = tr.values[n - 1] - tr.values[n - 2];
  tr.limit = last + d2 * q / (1.0 - q);
  tr.extrapolated = true;
  const double r = tr.eps[n - 1] / tr.eps[n - 2];
  if (r > 0.0 && r < 1.0) tr.order = std::log(q) / std::log(r);
  return tr;
}

PairingTrace pairing_trace(const GenFunc& f, const TestFunction& psi, const EpsLadder& ladder,
                           const PairingOptions& options) {
  const std::size_t n = ladder.size();
  std::vector<double> eps = ladder.values();
  std::vector<PairingValue> vals(n);
  parallel_for(n, options.jobs, [&](std::size_t k) { vals[k] = weak_pairing(f, psi, eps[k], options); });
  std::vector<double> values(n);
  bool warning = false;
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = vals[k].value;
    warning = warning || !vals[k].converged;
  }
  PairingTrace tr = analyze_trace(std::move(eps), std::move(values));
  tr.quadrature_warning = warning;
  return tr;
}

AssociationReport association_check(const GenFunc& f, const DistributionDescriptor& d,
                                    const std::vector<TestFunction>& battery,
                                    const EpsLadder& ladder, double tol,
                                    const PairingOptions& options) {
  if (battery.empty()) throw InputError("association check needs a nonempty test-function battery");
  AssociationReport report;
  report.tol = tol;
  report.entries.resize(battery.size());
  PairingOptions inner = options;
  // Parallelism is spent across the battery; rungs run serially per member.
  inner.jobs = 1;
  parallel_for(battery.size(), options.jobs, [&](std::size_t j) {
    AssociationEntry& e = report.entries[j];
    e.test_function = battery[j].name();
    e.trace = pairing_trace(f, battery[j], ladder, inner);
    e.expected = descriptor_pairing(d, battery[j]);
    e.scale = descriptor_magnitude(d, battery[j]);
    if (!(e.scale > 0.0)) e.scale = battery[j].l1_norm();
    e.error = std::abs(e.trace.limit - e.expected);
    e.pass = !e.trace.diverges && e.error < tol * e.scale;
  });
  report.pass = true;
  bool diverged = false;
  double worst = 0.0;
  for (const auto& e : report.entries) {
    report.pass = report.pass && e.pass;
    diverged = diverged || e.trace.diverges;
    if (e.scale > 0.0) worst = std::max(worst, e.error / e.scale);
  }
  if (diverged) {
    report.reason = "no associated distribution detected";
  } else if (!report.pass) {
    std::ostringstream os;
    os << "relative discrepancy " << worst << " exceeds tolerance " << tol;
    report.reason = os.str();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Delta coefficients

std::vector<TestFunction> locus_battery(const Hyperplane& locus, std::vector<double> center,
                                        std::vector<double> radius) {
  const std::size_t d = locus.normal.size();
  if (center.size() != d || radius.size() != d) throw InputError("locus battery: inconsistent dimensions");
  double n = norm(locus.normal);
  if (n == 0.0) throw InputError("locus battery: zero normal");
  std::vector<double> unit(d);
  for (std::size_t k = 0; k < d; ++k) unit[k] = locus.normal[k] / n;
  double r = 0.0;
  for (double v : radius) r = std::max(r, v);
  static constexpr double kShift[] = {0.0, 0.25, -0.35, 0.15, -0.1};
  static constexpr double kTilt[] = {0.0, 0.8, -0.6, -1.2, 0.4};
  std::vector<TestFunction> out;
  auto names = default_names(d);
  for (int j = 0; j < 5; ++j) {
    std::vector<double> c(d), tilt(d);
    for (std::size_t k = 0; k < d; ++k) {
      c[k] = center[k] + kShift[j] * radius[k] * unit[k];
      tilt[k] = kTilt[j] * unit[k] / r;
    }
    out.push_back(bump_test_function(names, c, radius, tilt, "psi" + std::to_string(j + 1)));
  }
  return out;
}

DeltaCoefficientResult identify_delta_coefficient(const GenFunc& f, const Hyperplane& locus,
                                                  const EpsLadder& ladder, int max_order,
                                                  const std::vector<TestFunction>& battery,
                                                  const PairingOptions& options) {
  if (max_order < 0) throw InputError("delta coefficient fit: order must be nonnegative");
  const std::size_t rows = battery.size();
  const std::size_t cols = static_cast<std::size_t>(max_order) + 2;
  if (rows < cols) throw InputError("delta coefficient fit: battery smaller than the basis");
  DeltaCoefficientResult res;
  res.traces.resize(rows);
  PairingOptions inner = options;
  inner.jobs = 1;
  parallel_for(rows, options.jobs,
               [&](std::size_t j) { res.traces[j] = pairing_trace(f, battery[j], ladder, inner); });
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (std::size_t j = 0; j < rows; ++j) {
    if (res.traces[j].diverges)
      throw ComputationError("delta coefficient fit: pairing against " + battery[j].name() +
                             " diverges");
    DistributionDescriptor one;
    one.regular = [](std::span<const double>) { return 1.0; };
    a(j, 0) = descriptor_pairing(one, battery[j]);
    for (std::size_t k = 1; k < cols; ++k) {
      DistributionDescriptor atom;
      atom.atoms.push_back(DeltaAtom{locus, static_cast<int>(k) - 1, Expr(1)});
      a(j, k) = descriptor_pairing(atom, battery[j]);
    }
    b(j) = res.traces[j].limit;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  res.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
  if (!(res.condition <= 1e6)) {
    std::ostringstream os;
    os << "delta coefficient fit: ill-conditioned battery (condition number " << res.condition
       << ")";
    throw ComputationError(os.str());
  }
  Eigen::VectorXd c = svd.solve(b);
  res.residual = (a * c - b).norm();
  res.coefficients.assign(c.data(), c.data() + c.size());
  return res;
}

}  // namespace genlie
