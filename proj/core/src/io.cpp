#include "genlie/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <json.hpp>

#include "genlie/error.hpp"
#include "genlie/parse.hpp"

namespace genlie::io {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

// Rejects keys outside `allowed`; `where` names the object in messages.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw InputError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError("missing key '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

Box parse_box(const json& j, const std::string& where) {
  Box b;
  try {
    for (const auto& r : j) {
      auto v = r.get<std::vector<double>>();
      if (v.size() != 2 || !(v[0] < v[1])) throw InputError(where + " needs [a, b] intervals with a < b");
      b.ranges.emplace_back(v[0], v[1]);
    }
  } catch (const json::exception&) {
    throw InputError(where + " must be a list of [a, b] intervals");
  }
  if (b.ranges.empty()) throw InputError(where + " must not be empty");
  return b;
}

Hyperplane parse_plane(const json& j, const std::string& where) {
  check_keys(j, where, {"normal", "offset"});
  Hyperplane h{get<std::vector<double>>(j, "normal", where), get_or<double>(j, "offset", 0.0, where)};
  if (h.normal.empty()) throw InputError(where + ": empty normal");
  return h;
}

Mollifier parse_mollifier(const std::string& tag) {
  if (tag == "bump") return Mollifier::bump();
  if (tag.rfind("moment:", 0) == 0) {
    try {
      return Mollifier::moment(std::stoi(tag.substr(7)));
    } catch (const std::logic_error&) {
    }
  }
  throw InputError("unknown mollifier '" + tag + "' (bump, moment:<m>)");
}

VectorField parse_field(const json& j, const JetSpace& jets, const Context& ctx, const std::string& where) {
  check_keys(j, where, {"xi", "phi"});
  std::vector<Expr> xi, phi;
  for (const auto& s : get<std::vector<std::string>>(j, "xi", where)) xi.push_back(parse(s, ctx));
  for (const auto& s : get<std::vector<std::string>>(j, "phi", where)) phi.push_back(parse(s, ctx));
  return VectorField(jets, std::move(xi), std::move(phi));
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const Config& c) {
  if (!(c.ladder.eps0 > 0.0)) throw InputError("ladder eps0 must be positive");
  if (!(c.ladder.ratio > 0.0 && c.ladder.ratio < 1.0)) throw InputError("ladder ratio must lie in (0, 1)");
  if (c.ladder.size() < 8) throw InputError("ladder needs at least 8 rungs (K >= 7)");
  if (c.tol && !(*c.tol > 0.0)) throw InputError("tol must be positive");
  if (!(c.pairing.rel_tol > 0.0) || !(c.pairing.abs_tol > 0.0)) throw InputError("quadrature tolerances must be positive");
  if (c.pairing.max_intervals < 1) throw InputError("quadrature budget must be positive");
  if (!(c.estimate.tolerance > 0.0) || !(c.estimate.floor > 0.0)) throw InputError("estimate tolerances must be positive");
  if (c.estimate.grid < 3 || c.estimate.grid_2d < 3 || c.estimate.tail < 3)
    throw InputError("estimate grids need at least 3 points and tails at least 3 rungs");
  if (c.q_max < 1) throw InputError("q_max must be positive");
  if (c.jobs < 1) throw InputError("jobs must be positive");
}

Config parse_config(const std::string& text) {
  json j = parse_json(text);
  const std::string w = "config";
  check_keys(j, w, {"ladder", "tol", "pairing", "estimate", "q_max", "eta_grid", "jobs", "seed", "out"});
  Config c;
  if (j.contains("ladder")) {
    const json& l = j["ladder"];
    check_keys(l, "config.ladder", {"eps0", "ratio", "K"});
    c.ladder.eps0 = get_or<double>(l, "eps0", c.ladder.eps0, "config.ladder");
    c.ladder.ratio = get_or<double>(l, "ratio", c.ladder.ratio, "config.ladder");
    c.ladder.K = get_or<int>(l, "K", c.ladder.K, "config.ladder");
  }
  if (j.contains("tol")) c.tol = get<double>(j, "tol", w);
  if (j.contains("pairing")) {
    const json& p = j["pairing"];
    check_keys(p, "config.pairing", {"rel_tol", "abs_tol", "max_intervals", "split_sqrt_eps"});
    c.pairing.rel_tol = get_or<double>(p, "rel_tol", c.pairing.rel_tol, "config.pairing");
    c.pairing.abs_tol = get_or<double>(p, "abs_tol", c.pairing.abs_tol, "config.pairing");
    c.pairing.max_intervals = get_or<int>(p, "max_intervals", c.pairing.max_intervals, "config.pairing");
    c.pairing.split_sqrt_eps = get_or<bool>(p, "split_sqrt_eps", c.pairing.split_sqrt_eps, "config.pairing");
  }
  if (j.contains("estimate")) {
    const json& e = j["estimate"];
    const std::string we = "config.estimate";
    check_keys(e, we, {"grid", "grid_2d", "locus_points", "tail", "tolerance", "floor"});
    c.estimate.grid = get_or<int>(e, "grid", c.estimate.grid, we);
    c.estimate.grid_2d = get_or<int>(e, "grid_2d", c.estimate.grid_2d, we);
    c.estimate.locus_points = get_or<int>(e, "locus_points", c.estimate.locus_points, we);
    c.estimate.tail = get_or<int>(e, "tail", c.estimate.tail, we);
    c.estimate.tolerance = get_or<double>(e, "tolerance", c.estimate.tolerance, we);
    c.estimate.floor = get_or<double>(e, "floor", c.estimate.floor, we);
  }
  c.q_max = get_or<int>(j, "q_max", c.q_max, w);
  c.eta_grid = get_or<std::vector<double>>(j, "eta_grid", c.eta_grid, w);
  c.jobs = get_or<int>(j, "jobs", c.jobs, w);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed, w);
  c.out = get_or<std::string>(j, "out", c.out.string(), w);
  validate(c);
  return c;
}

std::string config_json(const Config& c) {
  json j;
  j["ladder"] = {{"eps0", c.ladder.eps0}, {"ratio", c.ladder.ratio}, {"K", c.ladder.K}};
  if (c.tol) j["tol"] = *c.tol;
  j["pairing"] = {{"rel_tol", c.pairing.rel_tol}, {"abs_tol", c.pairing.abs_tol},
                  {"max_intervals", c.pairing.max_intervals}, {"split_sqrt_eps", c.pairing.split_sqrt_eps}};
  j["estimate"] = {{"grid", c.estimate.grid}, {"grid_2d", c.estimate.grid_2d},
                   {"locus_points", c.estimate.locus_points}, {"tail", c.estimate.tail},
                   {"tolerance", c.estimate.tolerance}, {"floor", c.estimate.floor}};
  j["q_max"] = c.q_max;
  j["eta_grid"] = c.eta_grid;
  j["jobs"] = c.jobs;
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  return j.dump(2);
}

// ---------------------------------------------------------------------------

SystemDocument parse_system_document(const std::string& text) {
  json j = parse_json(text);
  const std::string w = "system document";
  check_keys(j, w, {"name", "independent", "dependent", "order", "functions", "definitions", "equations",
                    "solved", "field", "ansatz", "primitives", "eta", "factors", "expected_equations", "data", "box"});
  SystemDocument d;
  d.name = get_or<std::string>(j, "name", "", w);
  d.jets = JetSpace(get<std::vector<std::string>>(j, "independent", w),
                    get<std::vector<std::string>>(j, "dependent", w), get_or<int>(j, "order", 1, w));
  if (j.contains("functions")) {
    for (const auto& f : j["functions"]) {
      check_keys(f, "functions entry", {"name", "params", "inverse"});
      d.context.declare({get<std::string>(f, "name", "functions entry"),
                         get_or<std::vector<std::string>>(f, "params", {"u"}, "functions entry"),
                         get_or<std::string>(f, "inverse", "", "functions entry")});
    }
  } else {
    d.context = Context::standard();
  }
  d.context.jets = d.jets;
  d.registry = std::make_shared<FunctionRegistry>();
  if (j.contains("definitions")) {
    for (const auto& f : j["definitions"]) {
      const std::string wf = "definitions entry";
      check_keys(f, wf, {"name", "params", "body"});
      auto params = get_or<std::vector<std::string>>(f, "params", {"u"}, wf);
      Context body_ctx = d.context;
      body_ctx.jets.reset();
      d.registry->define(get<std::string>(f, "name", wf), params, parse(get<std::string>(f, "body", wf), body_ctx));
    }
  }
  if (j.contains("equations")) {
    std::vector<Expr> eqs;
    for (const auto& s : get<std::vector<std::string>>(j, "equations", w)) eqs.push_back(parse(s, d.context));
    d.system = DifferentialSystem(d.jets, std::move(eqs));
    if (j.contains("solved")) {
      for (const auto& s : j["solved"]) {
        const std::string ws = "solved entry";
        check_keys(s, ws, {"equation", "variable", "power"});
        int nu = get<int>(s, "equation", ws);
        if (nu < 0 || static_cast<std::size_t>(nu) >= d.system->size())
          throw InputError("solved entry refers to a missing equation");
        d.system->solve_for(static_cast<std::size_t>(nu), parse(get<std::string>(s, "variable", ws), d.context),
                            get_or<int>(s, "power", 1, ws));
      }
    }
  } else if (j.contains("solved")) {
    throw InputError("solved forms need equations");
  }
  if (j.contains("field")) d.field = parse_field(j["field"], d.jets, d.context, "field");
  if (j.contains("ansatz")) d.ansatz = parse_field(j["ansatz"], d.jets, d.context, "ansatz");
  if (j.contains("primitives")) {
    for (const auto& p : j["primitives"]) {
      const std::string wp = "primitives entry";
      check_keys(p, wp, {"field", "antiderivative", "inverse"});
      d.primitives.push_back({get_or<std::string>(p, "field", "", wp), get<std::string>(p, "antiderivative", wp),
                              get<std::string>(p, "inverse", wp)});
    }
  }
  if (j.contains("eta")) d.eta = get<double>(j, "eta", w);
  if (j.contains("factors")) {
    const json& f = j["factors"];
    if (!f.is_object()) throw InputError("factors must map names to expressions");
    Context fc = d.context;
    for (auto it = f.begin(); it != f.end(); ++it) {
      if (!it.value().is_string()) throw InputError("factor '" + it.key() + "' must be an expression string");
      d.factors.emplace_back(it.key(), parse(it.value().get<std::string>(), fc));
    }
  }
  if (j.contains("expected_equations"))
    for (const auto& s : get<std::vector<std::string>>(j, "expected_equations", w))
      d.expected_equations.emplace_back(s, parse(s, d.context));
  if (j.contains("data")) {
    Context dc = d.context;
    dc.jets.reset();
    for (const auto& s : get<std::vector<std::string>>(j, "data", w)) d.data.push_back(parse(s, dc));
  }
  if (j.contains("box")) d.box = parse_box(j["box"], "box");
  return d;
}

// ---------------------------------------------------------------------------

FunctionDocument parse_function_document(const std::string& text) {
  json j = parse_json(text);
  const std::string w = "function document";
  check_keys(j, w, {"name", "variables", "mollifier", "function", "eps_power", "coefficient", "domain", "box",
                    "alpha", "descriptor", "battery"});
  FunctionDocument d;
  d.name = get_or<std::string>(j, "name", "", w);
  auto vars = get_or<std::vector<std::string>>(j, "variables", {"x"}, w);
  if (vars.empty() || vars.size() > 2) throw InputError("function documents have one or two variables");
  Mollifier rho = parse_mollifier(get_or<std::string>(j, "mollifier", "bump", w));
  Box domain = j.contains("domain") ? parse_box(j["domain"], "domain")
                                    : Box{std::vector<std::pair<double, double>>(vars.size(), {-1.0, 1.0})};
  if (domain.dim() != vars.size()) throw InputError("domain dimension does not match the variables");

  const json& f = j.contains("function") ? j["function"] : throw InputError("missing key 'function' in " + w);
  const std::string wf = "function";
  check_keys(f, wf, {"kind", "order", "power", "expr"});
  std::string kind = get<std::string>(f, "kind", wf);
  std::ostringstream desc;
  Context ctx;
  if (kind == "delta" || kind == "heaviside") {
    if (vars.size() != 1) throw InputError(kind + " embeddings are one-dimensional");
    if (kind == "delta") {
      int order = get_or<int>(f, "order", 0, wf);
      if (order < 0) throw InputError("delta order must be nonnegative");
      d.function = embed_delta_derivative(order, rho, domain);
      desc << "delta^(" << order << ") embedded with " << rho.name();
    } else {
      int power = get_or<int>(f, "power", 1, wf);
      if (power < 1) throw InputError("heaviside power must be positive");
      d.function = power == 1 ? embed_heaviside(rho, domain) : genlie::power(embed_heaviside(rho, domain), power);
      desc << "H^" << power << " embedded with " << rho.name();
    }
  } else if (kind == "smooth") {
    if (vars.size() != 1) throw InputError("smooth embeddings are one-dimensional");
    Expr e = parse(get<std::string>(f, "expr", wf), ctx);
    d.function = embed_smooth(e, rho, domain);
    desc << "(" << e.str() << ") * rho_eps";
  } else if (kind == "expr") {
    Expr e = parse(get<std::string>(f, "expr", wf), ctx);
    d.function = GenFunc::from_expr(e, vars, domain);
    desc << e.str();
  } else if (kind == "zero") {
    d.function = GenFunc::constant(0.0, domain);
    desc << "0";
  } else {
    throw InputError("unknown function kind '" + kind + "' (delta, heaviside, smooth, expr, zero)");
  }
  double p = get_or<double>(j, "eps_power", 0.0, w);
  double c = get_or<double>(j, "coefficient", 1.0, w);
  if (p != 0.0 || c != 1.0) {
    d.function = mul(GenFunc::eps_power(p, c, domain), d.function).with_loci(d.function.loci());
    desc << " times " << c << " eps^" << p;
  }
  d.description = desc.str();
  d.box = j.contains("box") ? parse_box(j["box"], "box") : domain;
  if (d.box.dim() != vars.size()) throw InputError("box dimension does not match the variables");
  d.alpha = get_or<std::vector<int>>(j, "alpha", std::vector<int>(vars.size(), 0), w);
  if (d.alpha.size() != vars.size()) throw InputError("alpha needs one entry per variable");

  if (j.contains("descriptor")) {
    const json& dj = j["descriptor"];
    const std::string wd = "descriptor";
    check_keys(dj, wd, {"regular", "atoms", "kinks", "description"});
    DistributionDescriptor dd;
    dd.description = get_or<std::string>(dj, "description", "", wd);
    if (dj.contains("regular")) {
      Expr e = parse(get<std::string>(dj, "regular", wd), ctx);
      auto compiled = std::make_shared<const CompiledExpr>(e, vars);
      dd.regular = [compiled](std::span<const double> x) { return (*compiled)(x); };
      if (dd.description.empty()) dd.description = e.str();
    }
    if (dj.contains("atoms")) {
      for (const auto& a : dj["atoms"]) {
        const std::string wa = "descriptor atom";
        check_keys(a, wa, {"normal", "offset", "order", "coefficient"});
        DeltaAtom atom;
        atom.locus = Hyperplane{get<std::vector<double>>(a, "normal", wa), get_or<double>(a, "offset", 0.0, wa)};
        if (atom.locus.normal.size() != vars.size()) throw InputError("atom normal has the wrong dimension");
        atom.order = get_or<int>(a, "order", 0, wa);
        if (a.contains("coefficient")) {
          if (a["coefficient"].is_number()) atom.coefficient = Expr(Number::real(a["coefficient"].get<double>()));
          else atom.coefficient = parse(get<std::string>(a, "coefficient", wa), ctx);
        }
        dd.atoms.push_back(std::move(atom));
      }
    }
    if (dj.contains("kinks"))
      for (const auto& k : dj["kinks"]) dd.kinks.push_back(parse_plane(k, "descriptor kink"));
    d.descriptor = std::move(dd);
  }
  if (j.contains("battery")) {
    const json& b = j["battery"];
    check_keys(b, "battery", {"center", "radius"});
    d.battery = scenario_battery(get<std::vector<double>>(b, "center", "battery"),
                                 get<std::vector<double>>(b, "radius", "battery"));
  } else if (d.descriptor) {
    std::vector<double> center, radius;
    for (auto [a, b] : d.box.ranges) {
      center.push_back(0.5 * (a + b));
      radius.push_back(0.4 * (b - a));
    }
    d.battery = scenario_battery(center, radius);
  }
  return d;
}

// ---------------------------------------------------------------------------

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream s;
  for (std::size_t k = 0; k < header.size(); ++k) s << (k ? "," : "") << header[k];
  s << "\n";
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw InputError("CSV row width does not match the header");
    for (std::size_t k = 0; k < r.size(); ++k) s << (k ? "," : "") << fmt(r[k]);
    s << "\n";
  }
  return s.str();
}

std::string traces_csv(const std::vector<std::pair<std::string, PairingTrace>>& traces) {
  std::ostringstream s;
  s << "test,k,eps,value\n";
  for (const auto& [name, t] : traces)
    for (std::size_t k = 0; k < t.eps.size(); ++k)
      s << '"' << name << "\"," << k << "," << fmt(t.eps[k]) << "," << fmt(t.values[k]) << "\n";
  return s.str();
}

std::string gnuplot_script(const std::string& csv_name, const std::string& title, int x_column, int y_column,
                           bool logscale) {
  std::ostringstream s;
  s << "set datafile separator ','\n";
  s << "set key autotitle columnhead\n";
  s << "set title '" << title << "'\n";
  if (logscale) s << "set logscale xy\n";
  s << "set xlabel 'column " << x_column << "'\n";
  s << "set ylabel 'column " << y_column << "'\n";
  s << "plot '" << csv_name << "' using " << x_column << ":(abs($" << y_column << ")) with linespoints\n";
  return s.str();
}

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

json trace_to_json(const PairingTrace& t) {
  json j;
  json eps = json::array(), values = json::array();
  for (double e : t.eps) eps.push_back(number(e));
  for (double v : t.values) values.push_back(number(v));
  j["eps"] = eps;
  j["values"] = values;
  j["limit"] = number(t.limit);
  j["order"] = number(t.order);
  j["extrapolated"] = t.extrapolated;
  j["diverges"] = t.diverges;
  j["growth_exponent"] = number(t.growth_exponent);
  j["quadrature_warning"] = t.quadrature_warning;
  return j;
}

}  // namespace

std::string pairing_trace_json(const PairingTrace& t) { return trace_to_json(t).dump(2); }

std::string report_json(const ScenarioReport& r) {
  json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["seconds"] = number(r.seconds);
  json params = json::object();
  for (const auto& [k, v] : r.parameters) params[k] = number(v);
  j["parameters"] = params;
  json verdicts = json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"name", v.name},
                        {"source", expected_source_name(v.source)},
                        {"expected", number(v.expected)},
                        {"measured", number(v.measured)},
                        {"error", number(v.error)},
                        {"tolerance", number(v.tolerance)},
                        {"pass", v.pass},
                        {"detail", v.detail}});
  j["verdicts"] = verdicts;
  json traces = json::object();
  for (const auto& [name, t] : r.traces) traces[name] = trace_to_json(t);
  j["traces"] = traces;
  json residuals = json::object();
  for (const auto& [name, n] : r.residuals) {
    json e = json::array(), s = json::array();
    for (double v : n.eps) e.push_back(number(v));
    for (double v : n.sups) s.push_back(number(v));
    residuals[name] = {{"eps", e}, {"sups", s}, {"largest_q", n.largest_q}, {"slope", number(n.slope)},
                       {"below_floor", n.below_floor}};
  }
  j["residuals"] = residuals;
  j["notes"] = r.notes;
  return j.dump(2);
}

}  // namespace genlie::io
