#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using genlie::cli::run;

namespace {

const fs::path kInputs = GENLIE_INPUTS_DIR;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome genlie_run(std::vector<std::string> args) {
  args.insert(args.begin(), "genlie");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("genlie-cli-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string input(const char* name) { return (kInputs / name).string(); }

}  // namespace

TEST(Cli, EstimateExpectationDrivesExitCode) {
  fs::path out = scratch("estimate");
  Outcome ok = genlie_run({"--out", out.string(), "estimate", input("delta_prime.json"), "--expect-exponent", "2"});
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  fs::path summary = out / "estimate" / "delta-prime" / "summary.json";
  ASSERT_TRUE(fs::exists(summary));
  auto j = nlohmann::json::parse(slurp(summary));
  EXPECT_EQ(j["command"], "estimate");
  EXPECT_TRUE(fs::exists(out / "estimate" / "delta-prime" / "sups.csv"));

  Outcome bad = genlie_run({"--out", out.string(), "estimate", input("delta_prime.json"), "--expect-exponent", "3"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
}

TEST(Cli, NegligibilityExpectations) {
  fs::path out = scratch("negl");
  EXPECT_EQ(genlie_run({"--out", out.string(), "estimate", input("zero.json"), "--expect-negligible", "6"}).code, 0);
  EXPECT_EQ(genlie_run({"--out", out.string(), "estimate", input("eps2_delta.json"), "--expect-not-negligible", "2"}).code, 0);
  EXPECT_EQ(genlie_run({"--out", out.string(), "estimate", input("eps2_delta.json"), "--expect-negligible", "2"}).code, 1);
}

TEST(Cli, InputErrorsExitTwo) {
  fs::path out = scratch("input");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"--out", out.string(), "embed", (out / "missing.json").string()},
           {"--out", out.string(), "--ladder-k", "3", "embed", input("delta.json")},
           {"--out", out.string(), "no-such-command"},
           {"--out", out.string(), "run-example", "nope"},
           {"--out", out.string(), "run-example", "traffic", "--set", "bogus=1"},
       }) {
    Outcome o = genlie_run(args);
    EXPECT_EQ(o.code, 2) << args.back() << o.err;
    auto j = nlohmann::json::parse(o.err);
    EXPECT_EQ(j["exit"], 2);
    EXPECT_TRUE(j.contains("message"));
  }
  write(out / "syntax.json", R"({"name": "s", "independent": ["x"], "dependent": ["u"], "equations": ["u_x +* 1"]})");
  EXPECT_EQ(genlie_run({"--out", out.string(), "prolong", (out / "syntax.json").string()}).code, 2);
}

TEST(Cli, ComputationErrorsExitThree) {
  fs::path out = scratch("compute");
  write(out / "blow.json", R"({"name": "blow", "independent": ["x", "t"], "dependent": ["u"],
    "equations": ["u_t - u^2"], "field": {"xi": ["0", "0"], "phi": ["5*u^2"]}, "eta": 1.0})");
  Outcome o = genlie_run({"--out", out.string(), "flow", (out / "blow.json").string()});
  EXPECT_EQ(o.code, 3) << o.err;
  EXPECT_EQ(nlohmann::json::parse(o.err)["error"], "ComputationError");
}

TEST(Cli, ConfigValidation) {
  fs::path out = scratch("config");
  EXPECT_EQ(genlie_run({"--config", input("config.json"), "--out", out.string(), "embed", input("delta.json")}).code, 0);
  write(out / "ratio.json", R"({"ladder": {"eps0": 0.5, "ratio": 1.5, "K": 12}})");
  write(out / "unknown.json", R"({"ladders": {}})");
  write(out / "tol.json", R"({"tol": -1})");
  write(out / "broken.json", R"({"ladder": )");
  for (const char* bad : {"ratio.json", "unknown.json", "tol.json", "broken.json"}) {
    Outcome o = genlie_run({"--config", (out / bad).string(), "--out", out.string(), "embed", input("delta.json")});
    EXPECT_EQ(o.code, 2) << bad << o.err;
  }
}

TEST(Cli, OutputsAreByteIdentical) {
  fs::path a = scratch("det-a"), b = scratch("det-b");
  for (const fs::path& out : {a, b}) {
    ASSERT_EQ(genlie_run({"--out", out.string(), "embed", input("delta.json")}).code, 0);
    ASSERT_EQ(genlie_run({"--out", out.string(), "associate", input("heaviside_square.json")}).code, 0);
  }
  for (const char* rel : {"embed/delta/samples.csv", "associate/heaviside-square/traces.csv"}) {
    ASSERT_TRUE(fs::exists(a / rel)) << rel;
    EXPECT_EQ(slurp(a / rel), slurp(b / rel)) << rel;
  }
}

TEST(Cli, SymbolicCommands) {
  fs::path out = scratch("symbolic");
  Outcome p = genlie_run({"--out", out.string(), "prolong", input("hopf_generator.json")});
  EXPECT_EQ(p.code, 0) << p.err;
  EXPECT_NE(p.out.find("phi^u_x = u_t + 2*u*u_x"), std::string::npos) << p.out;
  EXPECT_EQ(genlie_run({"--out", out.string(), "determine", input("traffic.json")}).code, 0);
  EXPECT_EQ(genlie_run({"--out", out.string(), "determine", input("dalembert.json")}).code, 0);
  EXPECT_EQ(genlie_run({"--out", out.string(), "flow", input("hopf_generator.json")}).code, 0);
  Outcome f = genlie_run({"--out", out.string(), "factor-check", input("hopf_generator.json")});
  EXPECT_EQ(f.code, 0) << f.out;
}

TEST(Cli, ReportIsIdempotent) {
  fs::path out = scratch("report");
  ASSERT_EQ(genlie_run({"--out", out.string(), "prolong", input("hopf_generator.json")}).code, 0);
  ASSERT_EQ(genlie_run({"--out", out.string(), "determine", input("traffic.json")}).code, 0);
  ASSERT_EQ(genlie_run({"--out", out.string(), "report"}).code, 0);
  std::string first = slurp(out / "report.json");
  ASSERT_EQ(genlie_run({"--out", out.string(), "report"}).code, 0);
  EXPECT_EQ(slurp(out / "report.json"), first);
  auto j = nlohmann::json::parse(first);
  EXPECT_FALSE(j.empty());
  EXPECT_TRUE(fs::exists(out / "report.csv"));
}
