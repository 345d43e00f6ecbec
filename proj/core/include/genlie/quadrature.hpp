#pragma once

#include <functional>
#include <vector>

namespace genlie {

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  int evaluations = 0;
};

// Globally adaptive Gauss-Kronrod 7-15 on [a,b]. Breakpoints inside (a,b)
// seed the initial partition; the integrand is never evaluated at a, b or a
// breakpoint.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     std::vector<double> breakpoints = {}, const QuadOptions& options = {});

// Iterated integral over [ax,bx] x [at,bt], x inner. `x_breakpoints(t)`
// supplies inner breakpoints for each outer node.
QuadResult integrate_2d(const std::function<double(double, double)>& f, double ax, double bx,
                        double at, double bt,
                        const std::function<std::vector<double>(double)>& x_breakpoints,
                        std::vector<double> t_breakpoints = {}, const QuadOptions& options = {});

// Breakpoints resolving a feature of width ~eps at `center`: a grid of
// spacing eps/4 on [center - 2 eps, center + 2 eps], clipped to (a,b).
std::vector<double> feature_breakpoints(double center, double eps, double a, double b);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1,1].
const GaussRule& gauss_legendre(int n);

}  // namespace genlie
