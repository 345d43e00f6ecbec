#include "genlie/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "genlie/error.hpp"

namespace genlie {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  std::size_t n = x.size();
  if (n == 0) return f;
  if (n == 1) {
    f.intercept = y[0];
    return f;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    f.residual = std::max(f.residual, std::fabs(y[i] - f.intercept - f.slope * x[i]));
  }
  return f;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  if (n <= 1) return {0.5 * (a + b)};
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

}  // namespace

double sup_norm(const GenFunc& f, const Box& k, double eps, const EstimateOptions& options) {
  if (k.dim() != f.arity()) throw InputError("sup_norm: box dimension differs from arity");
  double best = 0.0;
  auto visit = [&](std::span<const double> x) {
    double v = std::fabs(f(x, eps));
    if (!(std::isfinite(v))) throw DomainError("non-finite value while estimating sup norm");
    best = std::max(best, v);
  };
  const auto across = linspace(-2.0, 2.0, options.locus_points);
  if (k.dim() == 1) {
    for (double x : linspace(k.ranges[0].first, k.ranges[0].second, options.grid)) {
      double p[1] = {x};
      visit(p);
    }
    for (const auto& h : f.loci()) {
      if (h.normal[0] == 0.0) continue;
      for (double y : across) {
        double x = (h.offset + eps * y * std::fabs(h.normal[0])) / h.normal[0];
        if (x < k.ranges[0].first || x > k.ranges[0].second) continue;
        double p[1] = {x};
        visit(p);
      }
    }
    return best;
  }
  if (k.dim() != 2) throw InputError("sup_norm: supports boxes of dimension 1 or 2");
  auto gx = linspace(k.ranges[0].first, k.ranges[0].second, options.grid_2d);
  auto gt = linspace(k.ranges[1].first, k.ranges[1].second, options.grid_2d);
  for (double t : gt) {
    for (double x : gx) {
      double p[2] = {x, t};
      visit(p);
    }
  }
  for (const auto& h : f.loci()) {
    double norm = std::hypot(h.normal[0], h.normal[1]);
    std::size_t solve = std::fabs(h.normal[0]) >= std::fabs(h.normal[1]) ? 0 : 1;
    std::size_t other = 1 - solve;
    auto go = solve == 0 ? gt : gx;
    for (double o : go) {
      for (double y : across) {
        double p[2];
        p[other] = o;
        p[solve] = (h.offset + eps * y * norm - h.normal[other] * o) / h.normal[solve];
        if (p[solve] < k.ranges[solve].first || p[solve] > k.ranges[solve].second) continue;
        visit(p);
      }
    }
  }
  return best;
}

ModeratenessResult moderateness_estimate(const GenFunc& f, const Box& k, const std::vector<int>& alpha,
                                         const EpsLadder& ladder, const EstimateOptions& options) {
  if (!f.domain().contains(k)) throw InputError("moderateness_estimate: box outside the domain");
  GenFunc d = f.partial(alpha);
  ModeratenessResult r;
  r.eps = ladder.values();
  for (double e : r.eps) r.sups.push_back(sup_norm(d, k, e, options));
  std::vector<double> lx, ly;
  std::size_t n = r.eps.size();
  std::size_t tail = std::min<std::size_t>(static_cast<std::size_t>(options.tail), n);
  bool any = false;
  for (std::size_t i = n - tail; i < n; ++i) {
    if (r.sups[i] > 0.0) {
      any = true;
      lx.push_back(std::log(1.0 / r.eps[i]));
      ly.push_back(std::log(r.sups[i]));
    }
  }
  if (!any) {
    r.identically_zero = true;
    r.exponent = -std::numeric_limits<double>::infinity();
    r.pass = true;
    return r;
  }
  LineFit full = fit_line(lx, ly);
  std::size_t half = lx.size() / 2;
  LineFit late = fit_line({lx.begin() + static_cast<std::ptrdiff_t>(half), lx.end()},
                          {ly.begin() + static_cast<std::ptrdiff_t>(half), ly.end()});
  r.exponent = full.slope;
  r.pass = std::isfinite(full.slope) && std::fabs(full.slope - late.slope) <= options.tolerance;
  return r;
}

NegligibilityResult negligibility_from_table(const std::vector<double>& eps,
                                             const std::vector<double>& sups, int q_max,
                                             const EstimateOptions& options) {
  NegligibilityResult r;
  r.eps = eps;
  r.sups = sups;
  std::size_t n = eps.size();
  std::size_t tail = std::min<std::size_t>(static_cast<std::size_t>(options.tail), n);
  std::vector<double> lx, ly;
  for (std::size_t i = n - tail; i < n; ++i) {
    if (sups[i] > options.floor) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(sups[i]));
    }
  }
  r.pass.assign(static_cast<std::size_t>(q_max), false);
  if (lx.size() < 3) {
    r.below_floor = true;
    r.slope = std::numeric_limits<double>::infinity();
    r.pass.assign(static_cast<std::size_t>(q_max), true);
    r.largest_q = q_max;
    return r;
  }
  r.slope = fit_line(lx, ly).slope;
  for (int q = 1; q <= q_max; ++q) {
    r.pass[static_cast<std::size_t>(q - 1)] = r.slope >= q - options.tolerance;
  }
  r.largest_q = 0;
  while (r.largest_q < q_max && r.pass[static_cast<std::size_t>(r.largest_q)]) ++r.largest_q;
  return r;
}

NegligibilityResult negligibility_estimate(const GenFunc& f, const Box& k,
                                           const std::vector<int>& alpha, const EpsLadder& ladder,
                                           int q_max, const EstimateOptions& options) {
  if (!f.domain().contains(k)) throw InputError("negligibility_estimate: box outside the domain");
  GenFunc d = f.partial(alpha);
  std::vector<double> eps = ladder.values();
  std::vector<double> sups;
  for (double e : eps) sups.push_back(sup_norm(d, k, e, options));
  return negligibility_from_table(eps, sups, q_max, options);
}

bool generalized_equal(const GeneralizedNumber& a, const GeneralizedNumber& b, int q_max,
                       const EstimateOptions& options) {
  GeneralizedNumber d = difference(a, b);
  std::vector<double> mag;
  for (double v : d.values) mag.push_back(std::fabs(v));
  auto r = negligibility_from_table(d.eps, mag, q_max, options);
  return r.largest_q == q_max;
}

}  // namespace genlie
