#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genlie/assoc.hpp"
#include "genlie/estimate.hpp"
#include "genlie/factorization.hpp"
#include "genlie/genfunc.hpp"
#include "genlie/group_action.hpp"
#include "genlie/system.hpp"

namespace genlie {

// Where an expected value comes from: a value displayed in the worked
// example, an independent computation in this library (quadrature, a second
// derivation), or an exact identity.
enum class ExpectedSource { Published, Oracle, Exact };
const char* expected_source_name(ExpectedSource s);

struct Verdict {
  std::string name;
  ExpectedSource source = ExpectedSource::Exact;
  double expected = 0.0;
  double measured = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::map<std::string, double> parameters;
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, PairingTrace>> traces;
  std::vector<std::pair<std::string, NegligibilityResult>> residuals;
  std::vector<std::string> notes;
  double seconds = 0.0;
  bool pass = false;

  Verdict& add(Verdict v);
  void finish();  // pass = all verdicts pass
};

struct ScenarioConfig {
  EpsLadder ladder{0.5, 0.5, 12};
  PairingOptions pairing;
  EstimateOptions estimate;
  int jobs = 1;
};

struct Scenario {
  std::string name;
  std::optional<DifferentialSystem> system;
  std::map<std::string, double> parameters;
  std::vector<GenFunc> data;
  std::optional<VectorField> symmetry;
  std::optional<GroupAction> action;
  std::vector<std::pair<std::string, DistributionDescriptor>> expected;
  std::function<ScenarioReport(const Scenario&, const ScenarioConfig&)> runner;

  ScenarioReport run(const ScenarioConfig& config = {}) const;
};

// ---------------------------------------------------------------------------
// Shared building blocks

// Values of the jet coordinates (in JetSpace::coordinates order) of a
// representative at a point.
using JetEvaluator = std::function<std::vector<double>(std::span<const double> x, double eps)>;

// x -> Delta(jets(x, eps)) for one equation of a system.
GenFunc residual_function(const DifferentialSystem& sys, std::size_t equation, JetEvaluator jets,
                          Box domain, std::shared_ptr<const FunctionRegistry> registry = nullptr);

// Smooth odd increasing F with F(y) = sign(y) sqrt|y| for |y| >= 1 and F(y)
// = y for |y| <= 1/4, blended by a smooth step.
struct SignSqrt {
  static double value(double y);
  static double derivative(double y);
  static double inverse(double y);
};

struct HopfParams {
  double u_l = -0.5, u_r = 0.5, v_l = 0.0, v_r = 1.0;
  double eta = 3.0;
};

// Representatives of (U, V) for smoothed Riemann data, by characteristics.
// Throws DomainError inside the excluded backward wedge.
class HopfCharacteristics {
 public:
  HopfCharacteristics(HopfParams params, Mollifier rho);
  // Foot point x0 of the characteristic through (x, t).
  double foot(double x, double t, double eps) const;
  double u(double x, double t, double eps) const;
  double v(double x, double t, double eps) const;
  const HopfParams& params() const { return params_; }

 private:
  HopfParams params_;
  Mollifier rho_;
  std::shared_ptr<const BumpCdf> cdf_;
  double h(double x0, double eps) const;
};

// (ufan) and (vfan) as piecewise functions of (x, t), t > 0.
double hopf_ufan(const HopfParams& p, double x, double t);
double hopf_vfan(const HopfParams& p, double x, double t);

// Test functions used by the scenarios: three tilted bumps around `center`.
std::vector<TestFunction> scenario_battery(std::vector<double> center, std::vector<double> radius);

// ---------------------------------------------------------------------------
// Scenarios

Scenario hopf_system_scenario(const HopfParams& params = {});

struct TransportParams {
  int i = 0;
  double c = 1.0;
  double eta = 1.0;
};
Scenario transport_scenario(const TransportParams& params = {});

struct AcousticsParams {
  std::string f = "identity";  // "identity" or "signsqrt"
  std::string g = "identity";
  double eta = 0.5;
  double theta = 0.5;
  std::string data = "sine";   // "sine" or "delta"
};
Scenario acoustics_scenario(const AcousticsParams& params = {});

struct NonlindParams {
  int i = 1;
  double eta = 1.0;
  double lambda = 0.5;
};
Scenario nonlind_scenario(const NonlindParams& params = {});

struct TrafficParams {
  double a = 1.0, b = 0.5, jump = 0.4, u_star = 0.5;
  double u0 = 0.3;
  double eta = 0.5;
};
Scenario traffic_scenario(const TrafficParams& params = {});

struct DalembertParams {
  double eta = 0.5;
};
Scenario dalembert_hamilton_scenario(const DalembertParams& params = {});

// Names accepted by make_scenario, with parameters given as a name -> value
// map (unknown keys throw InputError).
std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name, const std::map<std::string, double>& params = {});

}  // namespace genlie
