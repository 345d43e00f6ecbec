#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "genlie/checks.hpp"
#include "genlie/error.hpp"
#include "genlie/factorization.hpp"
#include "genlie/io.hpp"
#include "genlie/parallel.hpp"

namespace genlie::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sanitize(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s.empty() ? "unnamed" : s;
}

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

// CSV whose cells are already formatted; text cells are quoted.
std::string text_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream s;
  for (std::size_t k = 0; k < header.size(); ++k) s << (k ? "," : "") << header[k];
  s << "\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) s << (k ? "," : "") << r[k];
    s << "\n";
  }
  return s.str();
}

std::string residuals_csv(const std::vector<std::pair<std::string, NegligibilityResult>>& residuals) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [name, n] : residuals)
    for (std::size_t k = 0; k < n.eps.size(); ++k)
      rows.push_back({quote(name), std::to_string(k), io::fmt(n.eps[k]), io::fmt(n.sups[k])});
  return text_csv({"check", "k", "eps", "sup"}, rows);
}

struct Artifact {
  std::string file;
  std::string content;
};

// Writes summary.json (plus traces, residual tables, plot scripts and the
// extra artifacts) under <out>/<command>/<name>/ and returns the exit code.
int emit(const io::Config& config, const std::string& command, const std::string& name, ScenarioReport& r,
         const json& extra, const std::vector<Artifact>& artifacts, std::ostream& out) {
  r.name = name;
  r.finish();
  if (r.verdicts.empty()) r.pass = true;
  fs::path dir = config.out / command / sanitize(name);
  json summary = json::parse(io::report_json(r));
  summary["command"] = command;
  summary["config"] = json::parse(io::config_json(config));
  for (auto it = extra.begin(); it != extra.end(); ++it) summary[it.key()] = it.value();
  io::write_atomic(dir / "summary.json", summary.dump(2) + "\n");
  if (!r.traces.empty()) {
    io::write_atomic(dir / "traces.csv", io::traces_csv(r.traces));
    io::write_atomic(dir / "traces.gp", io::gnuplot_script("traces.csv", name + " pairing traces", 3, 4));
  }
  if (!r.residuals.empty()) {
    io::write_atomic(dir / "residuals.csv", residuals_csv(r.residuals));
    io::write_atomic(dir / "residuals.gp", io::gnuplot_script("residuals.csv", name + " residual sup norms", 3, 4));
  }
  for (const auto& a : artifacts) io::write_atomic(dir / a.file, a.content);

  for (const auto& v : r.verdicts) {
    out << (v.pass ? "PASS " : "FAIL ") << v.name << "  measured=" << brief(v.measured);
    if (std::isfinite(v.expected) && v.expected != 0.0) out << " expected=" << brief(v.expected);
    out << " tol=" << brief(v.tolerance);
    if (!v.detail.empty()) out << "  (" << v.detail << ")";
    out << "\n";
  }
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  out << (r.pass ? "pass" : "fail") << ": " << (dir / "summary.json").string() << "\n";
  return r.pass ? Pass : VerdictFailure;
}

Verdict make_verdict(const std::string& name, bool pass, double measured, double expected, double tol,
                     const std::string& detail = {}, ExpectedSource source = ExpectedSource::Exact) {
  Verdict v;
  v.name = name;
  v.source = source;
  v.measured = measured;
  v.expected = expected;
  v.error = std::abs(measured - expected);
  v.tolerance = tol;
  v.pass = pass;
  v.detail = detail;
  return v;
}

std::string stem_or(const std::string& name, const std::string& path) {
  return name.empty() ? fs::path(path).stem().string() : name;
}

// Grid of n points per dimension over the box, row-major.
std::vector<std::vector<double>> grid(const Box& box, int n) {
  std::vector<std::vector<double>> pts{{}};
  for (auto [a, b] : box.ranges) {
    std::vector<std::vector<double>> next;
    for (const auto& p : pts)
      for (int i = 0; i < n; ++i) {
        auto q = p;
        q.push_back(n == 1 ? 0.5 * (a + b) : a + (b - a) * i / (n - 1));
        next.push_back(std::move(q));
      }
    pts = std::move(next);
  }
  return pts;
}

int grid_points(std::size_t dim) { return dim == 1 ? 201 : dim == 2 ? 41 : 5; }

std::vector<std::size_t> sample_rungs(const EpsLadder& l) {
  std::vector<std::size_t> k{0, l.size() / 2, l.size() - 1};
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

json strings(const std::vector<Expr>& es) {
  json a = json::array();
  for (const auto& e : es) a.push_back(e.str());
  return a;
}

// --- subcommands -----------------------------------------------------------

int cmd_embed(const io::Config& c, const std::string& path, std::ostream& out) {
  io::FunctionDocument d = io::parse_function_document(io::read_file(path));
  ScenarioReport r;
  std::vector<std::string> header{"k", "eps"};
  std::vector<std::string> names = d.function.variables();
  if (names.size() != d.box.dim()) {
    names.clear();
    for (std::size_t i = 0; i < d.box.dim(); ++i) names.push_back(i == 0 ? "x" : i == 1 ? "t" : "x" + std::to_string(i));
  }
  header.insert(header.end(), names.begin(), names.end());
  header.push_back("value");
  std::vector<std::vector<double>> rows;
  auto pts = grid(d.box, grid_points(d.box.dim()));
  std::size_t bad = 0;
  for (std::size_t k = 0; k < c.ladder.size(); ++k) {
    double eps = c.ladder[k];
    for (const auto& p : pts) {
      double v = d.function(std::span<const double>(p), eps);
      if (!std::isfinite(v)) ++bad;
      std::vector<double> row{static_cast<double>(k), eps};
      row.insert(row.end(), p.begin(), p.end());
      row.push_back(v);
      rows.push_back(std::move(row));
    }
  }
  r.add(make_verdict("representative finite on the sampling grid", bad == 0, static_cast<double>(bad), 0.0, 0.0));
  r.notes.push_back(d.description);
  int ycol = static_cast<int>(header.size());
  json extra{{"description", d.description}, {"rungs", c.ladder.size()}, {"points_per_rung", pts.size()}};
  return emit(c, "embed", stem_or(d.name, path), r, extra,
              {{"samples.csv", io::csv(header, rows)},
               {"samples.gp", io::gnuplot_script("samples.csv", d.description, 3, ycol, false)}},
              out);
}

struct EstimateFlags {
  std::optional<double> expect_exponent;
  double exponent_tol = 0.1;
  std::optional<int> expect_negligible;
  std::optional<int> expect_not_negligible;
};

int cmd_estimate(const io::Config& c, const std::string& path, const EstimateFlags& f, std::ostream& out) {
  io::FunctionDocument d = io::parse_function_document(io::read_file(path));
  ScenarioReport r;
  ModeratenessResult m = moderateness_estimate(d.function, d.box, d.alpha, c.ladder, c.estimate);
  r.add(make_verdict("moderate", m.pass, m.exponent, 0.0, c.estimate.tolerance,
                     m.identically_zero ? "identically zero on the tail" : "sup ~ eps^-p with p = measured"));
  if (f.expect_exponent) {
    double err = std::abs(m.exponent - *f.expect_exponent);
    r.add(make_verdict("moderateness exponent", err <= f.exponent_tol, m.exponent, *f.expect_exponent,
                       f.exponent_tol, {}, ExpectedSource::Oracle));
  }
  NegligibilityResult n = negligibility_estimate(d.function, d.box, d.alpha, c.ladder, c.q_max, c.estimate);
  auto check_q = [&](int q) {
    if (q < 1 || q > c.q_max) throw InputError("negligibility order must lie in [1, q_max]");
    return static_cast<bool>(n.pass[static_cast<std::size_t>(q - 1)]);
  };
  if (f.expect_negligible)
    r.add(make_verdict("negligible to order " + std::to_string(*f.expect_negligible), check_q(*f.expect_negligible),
                       n.largest_q, *f.expect_negligible, c.estimate.tolerance));
  if (f.expect_not_negligible)
    r.add(make_verdict("not negligible to order " + std::to_string(*f.expect_not_negligible),
                       !check_q(*f.expect_not_negligible), n.largest_q, *f.expect_not_negligible,
                       c.estimate.tolerance));
  json pass = json::array();
  for (bool b : n.pass) pass.push_back(b);
  json extra{{"description", d.description},
             {"moderateness", {{"exponent", m.exponent}, {"pass", m.pass}, {"identically_zero", m.identically_zero}}},
             {"negligibility", {{"largest_q", n.largest_q}, {"slope", std::isfinite(n.slope) ? json(n.slope) : json(io::fmt(n.slope))},
                                {"below_floor", n.below_floor}, {"pass_by_q", pass}}}};
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < m.eps.size(); ++k) rows.push_back({static_cast<double>(k), m.eps[k], m.sups[k]});
  return emit(c, "estimate", stem_or(d.name, path), r, extra,
              {{"sups.csv", io::csv({"k", "eps", "sup"}, rows)},
               {"sups.gp", io::gnuplot_script("sups.csv", d.description + " sup norms", 2, 3)}},
              out);
}

int cmd_associate(const io::Config& c, const std::string& path, std::ostream& out) {
  io::FunctionDocument d = io::parse_function_document(io::read_file(path));
  if (!d.descriptor) throw InputError("associate needs a descriptor in the function document");
  PairingOptions po = c.pairing;
  po.jobs = c.jobs;
  double tol = c.tol.value_or(1e-2);
  AssociationReport a = association_check(d.function, *d.descriptor, d.battery, c.ladder, tol, po);
  ScenarioReport r;
  checks::add_association(r, "association with " + d.descriptor->description, a, ExpectedSource::Oracle);
  if (!a.reason.empty()) r.notes.push_back(a.reason);
  json extra{{"description", d.description}, {"descriptor", d.descriptor->description}};
  return emit(c, "associate", stem_or(d.name, path), r, extra, {}, out);
}

int system_order(const io::SystemDocument& d) {
  return d.system ? d.system->order() : d.jets.max_order();
}

int cmd_prolong(const io::Config& c, const std::string& path, int order, std::ostream& out) {
  io::SystemDocument d = io::parse_system_document(io::read_file(path));
  if (!d.field) throw InputError("prolong needs a field in the system document");
  int n = order > 0 ? order : system_order(d);
  ProlongedField pr = prolong(*d.field, n);
  ScenarioReport r;
  json table = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& k : pr.coefficients) {
    table.push_back({{"dependent", k.dependent}, {"jet", k.jet.str()}, {"coefficient", k.value.str()}});
    rows.push_back({std::to_string(k.dependent), quote(k.jet.str()), quote(k.value.str())});
    out << "phi^" << k.jet.str() << " = " << k.value.str() << "\n";
  }
  json extra{{"field", d.field->str()}, {"order", n}, {"coefficients", table}};
  return emit(c, "prolong", stem_or(d.name, path), r, extra,
              {{"coefficients.csv", text_csv({"dependent", "jet", "coefficient"}, rows)}}, out);
}

int cmd_determine(const io::Config& c, const std::string& path, std::ostream& out) {
  io::SystemDocument d = io::parse_system_document(io::read_file(path));
  if (!d.system) throw InputError("determine needs equations in the system document");
  if (!d.ansatz) throw InputError("determine needs an ansatz in the system document");
  DeterminingEquations de = determining_equations(*d.system, *d.ansatz);
  ScenarioReport r;
  checks::add_equation_matches(r, "determining equation", de.equations, d.expected_equations,
                               ExpectedSource::Published);
  for (const auto& w : de.warnings) r.notes.push_back(w);
  json eqs = json::array();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < de.equations.size(); ++k) {
    eqs.push_back({{"monomial", de.monomials[k].str()}, {"equation", de.equations[k].str()}});
    rows.push_back({std::to_string(k), quote(de.monomials[k].str()), quote(de.equations[k].str())});
    out << "[" << de.monomials[k].str() << "] " << de.equations[k].str() << " = 0\n";
  }
  json extra{{"equations", eqs}, {"split", de.split}};
  return emit(c, "determine", stem_or(d.name, path), r, extra,
              {{"equations.csv", text_csv({"index", "monomial", "equation"}, rows)}}, out);
}

GroupAction build_flow(const io::SystemDocument& d) {
  if (!d.field) throw InputError("the system document needs a field");
  FlowOptions fo;
  fo.registry = d.registry;
  fo.primitives = d.primitives;
  return flow(*d.field, fo);
}

int cmd_flow(const io::Config& c, const std::string& path, std::ostream& out) {
  io::SystemDocument d = io::parse_system_document(io::read_file(path));
  GroupAction g = build_flow(d);
  ScenarioReport r;
  GroupLawReport law = check_group_law(g, 50, c.seed, 0.1);
  Verdict v = make_verdict("group law", law.pass, std::max(law.identity_error, law.composition_error), 0.0,
                           law.composition_tol, std::to_string(law.skipped) + " samples outside the domain");
  r.add(v);
  r.notes.push_back(g.description());

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> uni(-0.9, 0.9);
  std::vector<std::string> header{"eta"};
  for (const auto& s : d.jets.independent()) header.push_back(s);
  for (const auto& s : d.jets.dependent()) header.push_back(s);
  for (const auto& s : d.jets.independent()) header.push_back(s + "_out");
  for (const auto& s : d.jets.dependent()) header.push_back(s + "_out");
  std::vector<std::vector<double>> rows;
  int outside = 0;
  for (double eta : c.eta_grid)
    for (int s = 0; s < 5; ++s) {
      std::vector<double> x(g.p()), u(g.q()), xo(g.p()), uo(g.q());
      for (auto& e : x) e = uni(rng);
      for (auto& e : u) e = uni(rng);
      try {
        g.apply(eta, x, u, 0.1, xo, uo);
      } catch (const DomainError&) {
        ++outside;
        continue;
      }
      std::vector<double> row{eta};
      for (auto* part : {&x, &u, &xo, &uo}) row.insert(row.end(), part->begin(), part->end());
      rows.push_back(std::move(row));
    }
  if (outside) r.notes.push_back(std::to_string(outside) + " sample points outside the domain of the action");
  json extra{{"representation", g.closed_form() ? "closed form" : "numeric"},
             {"projectable", g.projectable()},
             {"field", d.field->str()},
             {"xi", strings(g.xi_exprs())},
             {"phi", strings(g.phi_exprs())}};
  return emit(c, "flow", stem_or(d.name, path), r, extra, {{"samples.csv", io::csv(header, rows)}}, out);
}

int cmd_transform(const io::Config& c, const std::string& path, std::ostream& out) {
  io::SystemDocument d = io::parse_system_document(io::read_file(path));
  if (d.data.empty()) throw InputError("transform needs data in the system document");
  if (d.data.size() != d.jets.q()) throw InputError("transform needs one data expression per dependent variable");
  GroupAction g = build_flow(d);
  Box box = d.box ? *d.box : Box{std::vector<std::pair<double, double>>(d.jets.p(), {-1.0, 1.0})};
  if (box.dim() != d.jets.p()) throw InputError("box dimension does not match the independent variables");
  std::vector<GenFunc> u;
  for (const auto& e : d.data)
    u.push_back(GenFunc::from_expr(e, d.jets.independent(), box, GrowthClass::Local, d.registry));
  std::vector<double> etas = d.eta ? std::vector<double>{*d.eta} : c.eta_grid;

  ScenarioReport r;
  std::vector<std::string> header{"eta", "k", "eps"};
  for (const auto& s : d.jets.independent()) header.push_back(s);
  for (const auto& s : d.jets.dependent()) header.push_back(s + "_transformed");
  std::vector<std::vector<double>> rows;
  auto pts = grid(box, d.jets.p() == 1 ? 41 : d.jets.p() == 2 ? 21 : 5);
  for (double eta : etas) {
    ActionResult a = apply_action(u, g, eta, box);
    std::ostringstream nm;
    nm << "slowly increasing fibre action at eta = " << eta;
    r.add(make_verdict(nm.str(), a.slow.slowly_increasing, a.slow.degree, 0.0, 12.0,
                       a.slow.domain_limited ? "action undefined somewhere on |u| <= 1/eps" : ""));
    for (const auto& w : a.warnings) r.notes.push_back(w);
    std::size_t bad = 0, outside = 0;
    for (std::size_t k : sample_rungs(c.ladder)) {
      double eps = c.ladder[k];
      for (const auto& p : pts) {
        std::vector<double> row{eta, static_cast<double>(k), eps};
        row.insert(row.end(), p.begin(), p.end());
        bool skip = false;
        for (const auto& f : a.functions) {
          double v;
          try {
            v = f(std::span<const double>(p), eps);
          } catch (const DomainError&) {
            skip = true;
            break;
          }
          if (!std::isfinite(v)) ++bad;
          row.push_back(v);
        }
        if (skip) {
          ++outside;
          continue;
        }
        rows.push_back(std::move(row));
      }
    }
    std::ostringstream fn;
    fn << "transformed representative finite at eta = " << eta;
    r.add(make_verdict(fn.str(), bad == 0, static_cast<double>(bad), 0.0, 0.0,
                       outside ? std::to_string(outside) + " grid points outside the domain" : ""));
  }
  json extra{{"action", g.description()}, {"data", strings(d.data)}};
  return emit(c, "transform", stem_or(d.name, path), r, extra, {{"samples.csv", io::csv(header, rows)}}, out);
}

int cmd_factor_check(const io::Config& c, const std::string& path, std::ostream& out) {
  io::SystemDocument d = io::parse_system_document(io::read_file(path));
  if (!d.system) throw InputError("factor-check needs equations in the system document");
  if (!d.eta) throw InputError("factor-check needs eta in the system document");
  GroupAction g = build_flow(d);
  FactorizationOptions fo;
  fo.registry = d.registry;
  fo.seed = c.seed;
  ScenarioReport r;
  json details = json::array();
  auto record = [&](const std::string& label, const FactorizationReport& f) {
    details.push_back({{"factor", label}, {"q_source", f.q_source}, {"max_rel_error", f.max_rel_error},
                       {"skipped", f.skipped}, {"pass", f.pass}});
  };
  std::optional<FactorizationReport> line;
  try {
    line = factorization_check(*d.system, g, *d.eta, fo);
  } catch (const InputError& e) {
    if (d.factors.empty()) throw;
    r.notes.push_back(std::string("line-integral factor unavailable: ") + e.what());
  }
  if (line) {
    record("line integral", *line);
    r.add(make_verdict("Delta(pr g z) = Q(z) Delta(z) with the line-integral Q", line->pass, line->max_rel_error,
                       0.0, fo.tol));
  }
  std::string best_name;
  double best = std::numeric_limits<double>::infinity();
  std::optional<FactorizationReport> best_report;
  for (const auto& [name, q] : d.factors) {
    FactorizationReport f = factorization_check(*d.system, g, *d.eta, fo, q);
    record(name, f);
    std::ostringstream n;
    n << "factor " << name << ": max relative error " << io::fmt(f.max_rel_error) << (f.pass ? " (matches)" : " (mismatch)");
    r.notes.push_back(n.str());
    if (f.max_rel_error < best) {
      best = f.max_rel_error;
      best_name = name;
      best_report = std::move(f);
    }
  }
  if (!d.factors.empty())
    r.add(make_verdict("some closed-form factor matches (best: " + best_name + ")", best <= fo.tol, best, 0.0, fo.tol));

  const FactorizationReport* shown = best_report ? &*best_report : line ? &*line : nullptr;
  std::vector<Artifact> files;
  if (shown) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> header{"sample", "left", "right", "q"};
    for (std::size_t k = 0; k < shown->left.size(); ++k)
      rows.push_back({static_cast<double>(k), shown->left[k], shown->right[k], shown->q[k]});
    files.push_back({"samples.csv", io::csv(header, rows)});
  }
  json extra{{"eta", *d.eta}, {"factors", details}};
  return emit(c, "factor-check", stem_or(d.name, path), r, extra, files, out);
}

std::map<std::string, double> parse_assignments(const std::vector<std::string>& sets) {
  std::map<std::string, double> m;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("parameter '" + s + "' must have the form key=value");
    std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    try {
      std::size_t used = 0;
      double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      m[key] = v;
    } catch (const std::logic_error&) {
      throw InputError("parameter '" + key + "' needs a numeric value");
    }
  }
  return m;
}

int cmd_run_example(const io::Config& c, const std::string& name, const std::vector<std::string>& sets,
                    std::ostream& out) {
  std::vector<std::string> names = name == "all" ? scenario_names() : std::vector<std::string>{name};
  if (name == "all" && !sets.empty()) throw InputError("parameters need a single scenario name");
  auto params = parse_assignments(sets);
  std::vector<Scenario> scenarios;
  for (const auto& n : names) scenarios.push_back(make_scenario(n, params));
  ScenarioConfig sc;
  sc.ladder = c.ladder;
  sc.pairing = c.pairing;
  sc.estimate = c.estimate;
  // Scenarios run concurrently when there are several; otherwise the jobs
  // go to the pairings inside the scenario.
  int outer = names.size() > 1 ? c.jobs : 1;
  sc.jobs = names.size() > 1 ? 1 : c.jobs;
  sc.pairing.jobs = sc.jobs;
  std::vector<ScenarioReport> reports(scenarios.size());
  parallel_for(scenarios.size(), outer, [&](std::size_t i) { reports[i] = scenarios[i].run(sc); });
  int code = Pass;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (c.tol) reports[i].notes.push_back("--tol is ignored by scenarios; each check carries its own tolerance");
    json extra{{"scenario", names[i]}};
    out << "== " << names[i] << "\n";
    int rc = emit(c, "run-example", names[i], reports[i], extra, {}, out);
    code = std::max(code, rc);
  }
  return code;
}

int cmd_report(const io::Config& c, std::ostream& out) {
  if (!fs::is_directory(c.out)) throw InputError("output directory " + c.out.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(c.out))
    if (e.is_regular_file() && e.path().filename() == "summary.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no summary.json files under " + c.out.string());
  json list = json::array();
  std::vector<std::vector<std::string>> rows;
  bool all = true;
  int verdicts = 0, failed = 0;
  for (const auto& f : files) {
    json s;
    try {
      s = json::parse(io::read_file(f));
    } catch (const json::exception&) {
      throw InputError("malformed summary " + f.string());
    }
    std::string rel = fs::relative(f, c.out).generic_string();
    bool pass = s.value("pass", false);
    all = all && pass;
    int nv = 0, nf = 0;
    if (s.contains("verdicts"))
      for (const auto& v : s["verdicts"]) {
        ++nv;
        bool vp = v.value("pass", false);
        if (!vp) ++nf;
        auto num = [&](const char* k) {
          const json& x = v[k];
          return x.is_number() ? io::fmt(x.get<double>()) : x.is_string() ? x.get<std::string>() : std::string("nan");
        };
        rows.push_back({quote(rel), quote(s.value("command", "")), quote(s.value("name", "")),
                        quote(v.value("name", "")), v.value("source", ""), num("expected"), num("measured"),
                        num("error"), num("tolerance"), vp ? "1" : "0"});
      }
    verdicts += nv;
    failed += nf;
    list.push_back({{"summary", rel}, {"command", s.value("command", "")}, {"name", s.value("name", "")},
                    {"pass", pass}, {"verdicts", nv}, {"failed", nf}});
    out << (pass ? "PASS " : "FAIL ") << rel << " (" << nv - nf << "/" << nv << ")\n";
  }
  json agg{{"summaries", list}, {"verdicts", verdicts}, {"failed", failed}, {"pass", all}};
  io::write_atomic(c.out / "report.json", agg.dump(2) + "\n");
  io::write_atomic(c.out / "report.csv",
                   text_csv({"summary", "command", "name", "verdict", "source", "expected", "measured", "error",
                             "tolerance", "pass"},
                            rows));
  out << (all ? "pass" : "fail") << ": " << (c.out / "report.json").string() << "\n";
  return all ? Pass : VerdictFailure;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  json e{{"error", kind}, {"message", message}, {"exit", code}};
  err << e.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group analysis of differential equations with generalized-function data"};
  app.name("genlie");
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  int ladder_k = -1;
  double tol = 0.0;
  std::string out_dir;
  int jobs = 0;
  long long seed = -1;
  app.add_option("--config", config_path, "JSON configuration file");
  auto* o_k = app.add_option("--ladder-k", ladder_k, "index of the last ladder rung (K)");
  auto* o_tol = app.add_option("--tol", tol, "association tolerance");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_jobs = app.add_option("--jobs", jobs, "worker threads");
  auto* o_seed = app.add_option("--seed", seed, "seed for sampled checks");

  std::string input;
  auto* embed = app.add_subcommand("embed", "sample a representative on the ladder");
  embed->add_option("input", input, "function document")->required();

  EstimateFlags ef;
  double expect_exponent = 0.0;
  int expect_neg = 0, expect_not_neg = 0;
  auto* estimate = app.add_subcommand("estimate", "moderateness and negligibility estimates");
  estimate->add_option("input", input, "function document")->required();
  auto* o_ee = estimate->add_option("--expect-exponent", expect_exponent, "expected moderateness exponent");
  estimate->add_option("--exponent-tol", ef.exponent_tol, "tolerance on the exponent");
  auto* o_en = estimate->add_option("--expect-negligible", expect_neg, "order q that must pass");
  auto* o_enn = estimate->add_option("--expect-not-negligible", expect_not_neg, "order q that must fail");

  auto* associate = app.add_subcommand("associate", "association with a distribution descriptor");
  associate->add_option("input", input, "function document")->required();

  int order = 0;
  auto* prolong_cmd = app.add_subcommand("prolong", "prolongation coefficients of a vector field");
  prolong_cmd->add_option("input", input, "system document")->required();
  prolong_cmd->add_option("--order", order, "prolongation order (default: system order)");

  auto* determine = app.add_subcommand("determine", "determining equations for an ansatz");
  determine->add_option("input", input, "system document")->required();
  auto* flow_cmd = app.add_subcommand("flow", "one-parameter group generated by a field");
  flow_cmd->add_option("input", input, "system document")->required();
  auto* transform = app.add_subcommand("transform", "apply the group action to data");
  transform->add_option("input", input, "system document")->required();
  auto* factor = app.add_subcommand("factor-check", "factorization identity of a symmetry group");
  factor->add_option("input", input, "system document")->required();

  std::string example;
  std::vector<std::string> sets;
  auto* run_example = app.add_subcommand("run-example", "run a built-in scenario (or 'all')");
  run_example->add_option("name", example, "scenario name")->required();
  run_example->add_option("--set", sets, "scenario parameter key=value");
  auto* report = app.add_subcommand("report", "aggregate summaries under the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    error_json(err, "UsageError", e.what(), InputFailure);
    return InputFailure;
  }

  try {
    io::Config c;
    if (!config_path.empty()) c = io::parse_config(io::read_file(config_path));
    if (o_k->count()) c.ladder.K = ladder_k;
    if (o_tol->count()) c.tol = tol;
    if (o_out->count()) c.out = out_dir;
    if (o_jobs->count()) c.jobs = jobs;
    if (o_seed->count()) {
      if (seed < 0) throw InputError("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(seed);
    }
    io::validate(c);
    if (o_ee->count()) ef.expect_exponent = expect_exponent;
    if (o_en->count()) ef.expect_negligible = expect_neg;
    if (o_enn->count()) ef.expect_not_negligible = expect_not_neg;

    if (*embed) return cmd_embed(c, input, out);
    if (*estimate) return cmd_estimate(c, input, ef, out);
    if (*associate) return cmd_associate(c, input, out);
    if (*prolong_cmd) return cmd_prolong(c, input, order, out);
    if (*determine) return cmd_determine(c, input, out);
    if (*flow_cmd) return cmd_flow(c, input, out);
    if (*transform) return cmd_transform(c, input, out);
    if (*factor) return cmd_factor_check(c, input, out);
    if (*run_example) return cmd_run_example(c, example, sets, out);
    if (*report) return cmd_report(c, out);
    throw InputError("no subcommand");
  } catch (const ParseError& e) {
    error_json(err, "ParseError", e.what(), InputFailure);
    return InputFailure;
  } catch (const InputError& e) {
    error_json(err, "InputError", e.what(), InputFailure);
    return InputFailure;
  } catch (const Error& e) {
    error_json(err, "ComputationError", e.what(), ComputationFailure);
    return ComputationFailure;
  } catch (const std::exception& e) {
    error_json(err, "Error", e.what(), ComputationFailure);
    return ComputationFailure;
  }
}

}  // namespace genlie::cli
