#pragma once

// Independent numeric oracles for the test suites. Nothing here calls the
// library; fields are plain lambdas.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

// Point field (xi, tau, phi) on (x, t, u).
using Field = std::function<std::array<double, 3>(double x, double t, double u)>;

// RK4 along the field for time eta.
inline std::array<double, 3> flow(const Field& f, std::array<double, 3> s, double eta, int steps = 200) {
  double h = eta / steps;
  for (int i = 0; i < steps; ++i) {
    auto k1 = f(s[0], s[1], s[2]);
    auto k2 = f(s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1], s[2] + 0.5 * h * k1[2]);
    auto k3 = f(s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1], s[2] + 0.5 * h * k2[2]);
    auto k4 = f(s[0] + h * k3[0], s[1] + h * k3[1], s[2] + h * k3[2]);
    for (int j = 0; j < 3; ++j) s[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return s;
}

// Jet z = (x, t, u, u_x, u_t, u_xx, u_xt, u_tt).
using Jet = std::array<double, 8>;

// d/deta at eta = 0 of the jets (u_x, u_t, u_xx, u_xt, u_tt) of the graph
// of the quadratic Taylor polynomial of z transported by a projectable
// field, evaluated at the transported base point; the sixth entry is phi
// itself. Fourth-order stencils in space (step h) and in eta (step d).
inline std::array<double, 6> prolonged_coefficients(const Field& f, const Jet& z, double h = 1e-2,
                                                    double d = 1e-2) {
  auto u0 = [&](double x, double t) {
    double dx = x - z[0], dt = t - z[1];
    return z[2] + z[3] * dx + z[4] * dt + 0.5 * z[5] * dx * dx + z[6] * dx * dt + 0.5 * z[7] * dt * dt;
  };
  auto transformed = [&](double eta, double X, double T) {
    auto back = flow(f, {X, T, 0.0}, -eta);  // projectable: base flow ignores u
    return flow(f, {back[0], back[1], u0(back[0], back[1])}, eta)[2];
  };
  auto d1 = [&](const std::function<double(double)>& g) {
    return (g(-2 * h) - 8 * g(-h) + 8 * g(h) - g(2 * h)) / (12 * h);
  };
  auto d2 = [&](const std::function<double(double)>& g) {
    return (-g(-2 * h) + 16 * g(-h) - 30 * g(0) + 16 * g(h) - g(2 * h)) / (12 * h * h);
  };
  auto jets = [&](double eta) {
    auto b = flow(f, {z[0], z[1], z[2]}, eta);
    double X = b[0], T = b[1];
    auto at = [&](double a, double c) { return transformed(eta, X + a, T + c); };
    std::array<double, 6> j;
    j[0] = d1([&](double s) { return at(s, 0); });
    j[1] = d1([&](double s) { return at(0, s); });
    j[2] = d2([&](double s) { return at(s, 0); });
    j[3] = d1([&](double s) { return d1([&](double r) { return at(s, r); }); });
    j[4] = d2([&](double s) { return at(0, s); });
    j[5] = b[2];
    return j;
  };
  auto m2 = jets(-2 * d), m1 = jets(-d), p1 = jets(d), p2 = jets(2 * d);
  std::array<double, 6> out;
  for (int k = 0; k < 6; ++k) out[k] = (m2[k] - 8 * m1[k] + 8 * p1[k] - p2[k]) / (12 * d);
  return out;
}

// Composite trapezoid rule; spectrally accurate for integrands whose
// derivatives all vanish at both ends.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  double h = (b - a) / n, s = 0.5 * (f(a) + f(b));
  for (int k = 1; k < n; ++k) s += f(a + k * h);
  return s * h;
}

// Unnormalized bump exp(-1 / (1 - y^2)) and its derivative.
inline double raw_bump(double y) {
  double s = 1.0 - y * y;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

inline double raw_bump_prime(double y) {
  double s = 1.0 - y * y;
  return s > 0.0 ? -2.0 * y / (s * s) * std::exp(-1.0 / s) : 0.0;
}

inline double bump_mass() { return trapezoid(raw_bump, -1.0, 1.0); }

// int sqrt|rho'| for the unit-mass bump. With y = s^2 on [0, 1] the cusp at
// 0 becomes smooth; the integrand is even.
inline double integral_sqrt_abs_bump_prime() {
  double z = bump_mass();
  auto g = [z](double s) { return std::sqrt(std::abs(raw_bump_prime(s * s)) / z) * 2.0 * s; };
  return 2.0 * trapezoid(g, 0.0, 1.0);
}

}  // namespace oracle
