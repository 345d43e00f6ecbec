#include "genlie/quadrature.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace genlie {
namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error, l1;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double rk = fc * kWgk[7];
  double rg = fc * kWg[3];
  double l1 = std::fabs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    double f1 = f(c - dx);
    double f2 = f(c + dx);
    rk += kWgk[j] * (f1 + f2);
    l1 += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, rk * h, std::fabs((rk - rg) * h), l1 * std::fabs(h)};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     std::vector<double> breakpoints, const QuadOptions& options) {
  QuadResult res;
  if (a == b) return res;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> pts{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double p : breakpoints)
    if (p > a && p < b && p > pts.back()) pts.push_back(p);
  pts.push_back(b);

  std::priority_queue<Segment> heap;
  double total = 0.0, err = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Segment s = kronrod(f, pts[i], pts[i + 1]);
    res.evaluations += 15;
    total += s.value;
    err += s.error;
    l1 += s.l1;
    heap.push(s);
  }
  auto target = [&] {
    return std::max({options.abs_tol, options.rel_tol * std::fabs(total), 64 * DBL_EPSILON * l1});
  };
  while (err > target()) {
    if (static_cast<int>(heap.size()) >= options.max_intervals) {
      res.converged = false;
      break;
    }
    Segment s = heap.top();
    double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b)) {
      res.converged = false;
      break;
    }
    heap.pop();
    Segment l = kronrod(f, s.a, mid);
    Segment r = kronrod(f, mid, s.b);
    res.evaluations += 30;
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    l1 += l.l1 + r.l1 - s.l1;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = sign * total;
  res.error = err;
  return res;
}

QuadResult integrate_2d(const std::function<double(double, double)>& f, double ax, double bx,
                        double at, double bt,
                        const std::function<std::vector<double>(double)>& x_breakpoints,
                        std::vector<double> t_breakpoints, const QuadOptions& options) {
  QuadResult out;
  QuadOptions inner = options;
  inner.abs_tol = options.abs_tol * 0.1;
  inner.rel_tol = options.rel_tol * 0.1;
  auto outer = [&](double t) {
    std::vector<double> bp = x_breakpoints ? x_breakpoints(t) : std::vector<double>{};
    QuadResult r = integrate([&](double x) { return f(x, t); }, ax, bx, std::move(bp), inner);
    out.evaluations += r.evaluations;
    if (!r.converged) out.converged = false;
    return r.value;
  };
  QuadResult r = integrate(outer, at, bt, std::move(t_breakpoints), options);
  out.value = r.value;
  out.error = r.error;
  out.converged = out.converged && r.converged;
  return out;
}

std::vector<double> feature_breakpoints(double center, double eps, double a, double b) {
  std::vector<double> bp;
  for (int k = -8; k <= 8; ++k) {
    double p = center + k * eps / 4.0;
    if (p > a && p < b) bp.push_back(p);
  }
  return bp;
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace genlie
