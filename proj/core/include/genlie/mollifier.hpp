#pragma once

#include <memory>
#include <string>
#include <vector>

#include "genlie/expr.hpp"

namespace genlie {

enum class Support { Compact, RapidlyDecreasing };

// Smoothing kernel rho on R with unit integral and certified vanishing
// moments of orders 1..m. Derivatives of every order are exact.
class Mollifier {
 public:
  // C exp(-1/(1-y^2)) on (-1,1); m = 0.
  static Mollifier bump();
  // P(y) G(y) with G the standard Gaussian and P a combination of Hermite
  // polynomials chosen so that moments 1..m vanish; m = 0 gives G itself.
  static Mollifier moment(int m);

  const std::string& name() const { return name_; }
  Support support() const { return support_; }
  int certified_moments() const { return m_; }
  // Interval outside of which rho and all derivatives are zero (compact) or
  // below 1e-30 (rapidly decreasing).
  double radius() const { return radius_; }
  const Expr& kernel() const { return kernel_; }  // in the symbol y

  double operator()(double y) const { return derivative(0, y); }
  double derivative(int k, double y) const;
  // rho_eps^(k)(x) = eps^(-1-k) rho^(k)(x/eps).
  double scaled(int k, double x, double eps) const;
  // Moment integral of y^k rho(y) by quadrature.
  double moment_integral(int k) const;
  // Sup of |rho^(k)| by dense sampling.
  double sup_derivative(int k) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::string name_;
  Support support_ = Support::Compact;
  int m_ = 0;
  double radius_ = 1.0;
  Expr kernel_;
};

// Cumulative distribution of the bump, H(z) = int_{-inf}^z rho, tabulated on
// 2049 nodes of [-1,1] with cubic Hermite interpolation (H' = rho exactly at
// nodes). H = 0 below -1 and 1 above 1.
class BumpCdf {
 public:
  explicit BumpCdf(const Mollifier& rho);
  double operator()(double z) const;

 private:
  std::vector<double> values_;
  std::vector<double> slopes_;
  double h_ = 0.0;
};

}  // namespace genlie
