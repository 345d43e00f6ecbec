#pragma once

#include <vector>

#include "genlie/genfunc.hpp"

namespace genlie {

struct EstimateOptions {
  int grid = 401;           // uniform points per dimension (2D boxes use grid_2d)
  int grid_2d = 121;
  int locus_points = 161;   // samples across each singular locus, spanning +-2 eps
  int tail = 8;             // rungs used by the tail fits
  double tolerance = 0.2;
  double floor = 1e-12;     // sups below this count as machine zero
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max abs deviation from the fitted line
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// sup_{x in K} |f(x, eps)| over a uniform grid refined at eps scale across
// every singular locus of f.
double sup_norm(const GenFunc& f, const Box& k, double eps, const EstimateOptions& options = {});

struct ModeratenessResult {
  std::vector<double> eps;
  std::vector<double> sups;
  double exponent = 0.0;  // p with sup ~ eps^{-p}
  bool pass = false;
  bool identically_zero = false;
};

ModeratenessResult moderateness_estimate(const GenFunc& f, const Box& k, const std::vector<int>& alpha,
                                         const EpsLadder& ladder, const EstimateOptions& options = {});

struct NegligibilityResult {
  std::vector<double> eps;
  std::vector<double> sups;
  std::vector<bool> pass;  // pass[q-1] for q = 1..q_max
  int largest_q = 0;
  double slope = 0.0;      // fitted q with sup ~ eps^q over the tail above the floor
  bool below_floor = false;
};

NegligibilityResult negligibility_from_table(const std::vector<double>& eps,
                                             const std::vector<double>& sups, int q_max,
                                             const EstimateOptions& options = {});

NegligibilityResult negligibility_estimate(const GenFunc& f, const Box& k,
                                           const std::vector<int>& alpha, const EpsLadder& ladder,
                                           int q_max = 6, const EstimateOptions& options = {});

// Equality of generalized numbers: negligibility of the difference table.
bool generalized_equal(const GeneralizedNumber& a, const GeneralizedNumber& b, int q_max = 6,
                       const EstimateOptions& options = {});

}  // namespace genlie
