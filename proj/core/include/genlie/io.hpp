#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genlie/assoc.hpp"
#include "genlie/context.hpp"
#include "genlie/estimate.hpp"
#include "genlie/group_action.hpp"
#include "genlie/scenarios.hpp"
#include "genlie/system.hpp"

namespace genlie::io {

// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string fmt(double v);

// Write to a sibling temporary file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

struct Config {
  EpsLadder ladder{0.5, 0.5, 12};
  std::optional<double> tol;  // overrides the per-check association tolerance
  PairingOptions pairing;
  EstimateOptions estimate;
  int q_max = 6;
  std::vector<double> eta_grid{0.25, 0.5, 1.0};
  int jobs = 1;
  std::uint64_t seed = 1;
  std::filesystem::path out = "genlie-out";
};

// Throws InputError on schema violations: unknown keys, non-positive
// tolerances, ladders shorter than 8 rungs.
Config parse_config(const std::string& json_text);
void validate(const Config& c);
std::string config_json(const Config& c);

// A system / vector field document; see docs/grammar.md.
struct SystemDocument {
  std::string name;
  JetSpace jets;
  Context context;
  std::optional<DifferentialSystem> system;
  std::optional<VectorField> field;
  std::optional<VectorField> ansatz;
  std::vector<FlowPrimitive> primitives;
  std::shared_ptr<FunctionRegistry> registry;
  std::optional<double> eta;
  std::vector<std::pair<std::string, Expr>> factors;
  // Displayed determining equations to match, keyed by their source text.
  std::vector<std::pair<std::string, Expr>> expected_equations;
  std::vector<Expr> data;  // component functions in the independent variables (and eps)
  std::optional<Box> box;
};
SystemDocument parse_system_document(const std::string& json_text);

// A generalized function with optional descriptor and battery for embed,
// estimate and associate.
struct FunctionDocument {
  std::string name;
  GenFunc function;
  std::string description;
  Box box;
  std::vector<int> alpha;
  std::optional<DistributionDescriptor> descriptor;
  std::vector<TestFunction> battery;
};
FunctionDocument parse_function_document(const std::string& json_text);

// CSV with a header row; each row has one value per column.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
// Columns test,k,eps,value for every trace.
std::string traces_csv(const std::vector<std::pair<std::string, PairingTrace>>& traces);
// Plots column `y` against column `x` of a CSV on log-log axes.
std::string gnuplot_script(const std::string& csv_name, const std::string& title, int x_column,
                           int y_column, bool logscale = true);

std::string report_json(const ScenarioReport& r);
std::string pairing_trace_json(const PairingTrace& t);

}  // namespace genlie::io
