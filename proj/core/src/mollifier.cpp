#include "genlie/mollifier.hpp"

#include <cmath>
#include <deque>
#include <mutex>

#include <Eigen/Dense>

#include "genlie/error.hpp"
#include "genlie/parse.hpp"
#include "genlie/quadrature.hpp"

namespace genlie {
namespace {

using Poly = std::vector<double>;  // ascending coefficients

double horner(const Poly& p, double y) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * y + *it;
  return r;
}

Poly poly_derivative(const Poly& p) {
  Poly d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

Poly poly_add(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Probabilists' Hermite polynomials He_0..He_n.
std::vector<Poly> hermite(int n) {
  std::vector<Poly> he{{1.0}, {0.0, 1.0}};
  for (int k = 2; k <= n; ++k) {
    Poly next = poly_mul(he[static_cast<std::size_t>(k - 1)], {0.0, 1.0});
    Poly prev = he[static_cast<std::size_t>(k - 2)];
    for (double& c : prev) c *= -(k - 1.0);
    he.push_back(poly_add(next, prev));
  }
  he.resize(static_cast<std::size_t>(n + 1));
  return he;
}

// Gaussian moments E[y^n] = (n-1)!! for even n.
double gaussian_moment(std::size_t n) {
  if (n % 2 == 1) return 0.0;
  double r = 1.0;
  for (std::size_t k = n; k > 1; k -= 2) r *= static_cast<double>(k - 1);
  return r;
}

}  // namespace

struct Mollifier::Impl {
  bool bump = true;
  double scale = 1.0;  // normalization constant C (bump)
  // Derivative numerators: bump: rho^(k) = C e^{-1/s} P_k / s^{2k} with
  // s = 1 - y^2; Gaussian family: rho^(k) = P_k G.
  mutable std::deque<Poly> numerators;
  mutable std::mutex mutex;
  int ready = 0;  // numerators[0..ready) are immutable and readable without the lock

  void warm(int k) {
    numerator(k);
    ready = static_cast<int>(numerators.size());
  }

  const Poly& numerator(int k) const {
    if (k < ready) return numerators[static_cast<std::size_t>(k)];
    std::lock_guard<std::mutex> lock(mutex);
    while (static_cast<int>(numerators.size()) <= k) {
      const Poly& p = numerators.back();
      int j = static_cast<int>(numerators.size()) - 1;
      Poly dp = poly_derivative(p);
      Poly next;
      if (bump) {
        const Poly s{1.0, 0.0, -1.0};
        Poly s2 = poly_mul(s, s);
        next = poly_mul(dp, s2);
        next = poly_add(next, poly_mul(poly_mul({0.0, 4.0 * j}, s), p));
        next = poly_add(next, poly_mul({0.0, -2.0}, p));
      } else {
        next = poly_add(dp, poly_mul({0.0, -1.0}, p));
      }
      numerators.push_back(std::move(next));
    }
    return numerators[static_cast<std::size_t>(k)];
  }
};

Mollifier Mollifier::bump() {
  static const Mollifier cached = [] {
    auto impl = std::make_shared<Impl>();
    impl->bump = true;
    impl->numerators = {{1.0}};
    impl->warm(8);
    auto raw = [](double y) {
      double s = 1.0 - y * y;
      return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
    };
    QuadOptions o;
    o.rel_tol = 1e-14;
    double z = integrate(raw, -1.0, 1.0, {0.0}, o).value;
    impl->scale = 1.0 / z;
    Mollifier m;
    m.impl_ = impl;
    m.name_ = "bump";
    m.support_ = Support::Compact;
    m.m_ = 0;
    m.radius_ = 1.0;
    Context ctx;
    m.kernel_ = parse(Number::real(impl->scale).to_string() + "*exp(-1/(1-y^2))", ctx);
    return m;
  }();
  return cached;
}

Mollifier Mollifier::moment(int m) {
  if (m < 0) throw InputError("moment mollifier order must be nonnegative");
  auto he = hermite(m);
  std::size_t n = static_cast<std::size_t>(m) + 1;
  // A(k, j) = int y^k He_j G dy, lower triangular in (k, j).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < he[j].size(); ++c) s += he[j][c] * gaussian_moment(k + c);
      a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = s;
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  rhs(0) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw ComputationError("singular moment system");
  Eigen::VectorXd c = lu.solve(rhs);
  Poly p{0.0};
  for (std::size_t j = 0; j < n; ++j) {
    Poly term = he[j];
    for (double& v : term) v *= c(static_cast<Eigen::Index>(j));
    p = poly_add(p, term);
  }
  for (double& v : p)
    if (std::fabs(v) < 1e-14) v = 0.0;
  p[0] /= std::sqrt(2.0 * M_PI);
  for (std::size_t i = 1; i < p.size(); ++i) p[i] /= std::sqrt(2.0 * M_PI);

  auto impl = std::make_shared<Impl>();
  impl->bump = false;
  impl->numerators = {p};
  impl->warm(8);
  Mollifier mol;
  mol.impl_ = impl;
  mol.name_ = m == 0 ? "gaussian" : "hermite" + std::to_string(m);
  mol.support_ = Support::RapidlyDecreasing;
  mol.m_ = m;
  mol.radius_ = 12.0;
  std::string poly;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (!poly.empty()) poly += " + ";
    poly += "(" + Number::real(p[i]).to_string() + ")*y^" + std::to_string(i);
  }
  Context ctx;
  mol.kernel_ = parse("(" + poly + ")*exp(-y^2/2)", ctx);
  return mol;
}

double Mollifier::derivative(int k, double y) const {
  const Poly& p = impl_->numerator(k);
  if (impl_->bump) {
    double s = 1.0 - y * y;
    if (!(s > 0.0)) return 0.0;
    // e^{-1/s} s^{-2k} evaluated in log form: underflows cleanly to 0.
    double lg = -1.0 / s - 2.0 * k * std::log(s);
    return impl_->scale * horner(p, y) * std::exp(lg);
  }
  if (std::fabs(y) > 40.0) return 0.0;
  return horner(p, y) * std::exp(-0.5 * y * y);
}

double Mollifier::scaled(int k, double x, double eps) const {
  return std::pow(eps, -1.0 - k) * derivative(k, x / eps);
}

double Mollifier::moment_integral(int k) const {
  QuadOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-15;
  auto f = [&](double y) { return std::pow(y, k) * derivative(0, y); };
  return integrate(f, -radius_, radius_, {0.0}, o).value;
}

double Mollifier::sup_derivative(int k) const {
  double best = 0.0;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    double y = -radius_ + 2.0 * radius_ * i / n;
    best = std::max(best, std::fabs(derivative(k, y)));
  }
  return best;
}

// ---------------------------------------------------------------------------

BumpCdf::BumpCdf(const Mollifier& rho) {
  if (rho.support() != Support::Compact) {
    throw InputError("Heaviside embedding needs a compactly supported kernel");
  }
  const int n = 2048;
  h_ = 2.0 / n;
  values_.resize(n + 1);
  slopes_.resize(n + 1);
  QuadOptions o;
  o.rel_tol = 1e-14;
  o.abs_tol = 1e-17;
  double acc = 0.0;
  values_[0] = 0.0;
  slopes_[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    double a = -1.0 + (i - 1) * h_;
    double b = -1.0 + i * h_;
    acc += integrate([&](double y) { return rho(y); }, a, b, {}, o).value;
    values_[static_cast<std::size_t>(i)] = acc;
    slopes_[static_cast<std::size_t>(i)] = rho(b);
  }
  // Normalize away the residual quadrature drift so H(1) = 1 exactly.
  for (double& v : values_) v /= acc;
  values_[static_cast<std::size_t>(n)] = 1.0;
}

double BumpCdf::operator()(double z) const {
  if (z <= -1.0) return 0.0;
  if (z >= 1.0) return 1.0;
  double s = (z + 1.0) / h_;
  auto i = static_cast<std::size_t>(s);
  if (i >= values_.size() - 1) i = values_.size() - 2;
  double t = s - static_cast<double>(i);
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * values_[i] + h10 * h_ * slopes_[i] + h01 * values_[i + 1] +
         h11 * h_ * slopes_[i + 1];
}

}  // namespace genlie
