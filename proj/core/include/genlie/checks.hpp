#pragma once

#include <string>

#include "genlie/scenarios.hpp"

namespace genlie::checks {

// One verdict per battery entry plus the traces.
void add_association(ScenarioReport& r, const std::string& label, const AssociationReport& a,
                     ExpectedSource source);

// Negligibility of a residual to order q on the box.
void add_residual(ScenarioReport& r, const std::string& label, const GenFunc& residual,
                  const Box& box, const ScenarioConfig& config, int q, ExpectedSource source);

// For each displayed expression, the best random-point agreement (up to a
// constant factor) with any of the computed equations.
void add_equation_matches(ScenarioReport& r, const std::string& label, const std::vector<Expr>& got,
                          const std::vector<std::pair<std::string, Expr>>& displayed,
                          ExpectedSource source, double tol = 1e-10);

// Absolute agreement of two numbers.
Verdict compare(const std::string& name, ExpectedSource source, double expected, double measured,
                double tol, bool relative = false);

// Largest |f - g| over a fixed grid of the box at eps.
double max_difference(const GenFunc& f, const GenFunc& g, const Box& box, double eps, int n = 21);

// log|sinh y| and log cosh y without overflow.
double log_sinh_abs(double y);
double log_cosh(double y);

}  // namespace genlie::checks
