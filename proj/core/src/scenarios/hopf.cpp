#include <cmath>
#include <memory>

#include "genlie/checks.hpp"
#include "genlie/error.hpp"
#include "genlie/parse.hpp"

namespace genlie {

using checks::add_association;
using checks::add_residual;
using checks::compare;

Scenario hopf_system_scenario(const HopfParams& params) {
  if (!(-1.0 < params.u_l && params.u_l < params.u_r && params.u_r < 1.0))
    throw InputError("Hopf scenario needs -1 < u_L < u_R < 1");
  Scenario s;
  s.name = "hopf";
  s.parameters = {{"u_l", params.u_l}, {"u_r", params.u_r}, {"v_l", params.v_l},
                  {"v_r", params.v_r}, {"eta", params.eta}};
  JetSpace jets({"x", "t"}, {"u", "v"}, 1);
  Context ctx;
  ctx.jets = jets;
  DifferentialSystem sys(jets, {parse("u_t + u*u_x", ctx), parse("v_t + u*v_x", ctx)});
  sys.solve_for(0, parse("u_t", ctx));
  sys.solve_for(1, parse("v_t", ctx));
  s.system = sys;
  s.symmetry = VectorField(jets, {parse("-t", ctx), parse("-x", ctx)}, {parse("u^2 - 1", ctx), Expr(0)});
  s.action = flow(*s.symmetry);

  auto ch = std::make_shared<const HopfCharacteristics>(params, Mollifier::bump());
  const Box domain = Box::rect(-3.0, 3.0, -3.0, 3.0);
  const std::vector<Hyperplane> edges{Hyperplane{{1.0, -params.u_l}, 0.0}, Hyperplane{{1.0, -params.u_r}, 0.0}};
  GenFunc u(2, [ch](std::span<const double> x, double eps) { return ch->u(x[0], x[1], eps); }, domain,
            GrowthClass::Local, "U by characteristics");
  GenFunc v(2, [ch](std::span<const double> x, double eps) { return ch->v(x[0], x[1], eps); }, domain,
            GrowthClass::Local, "V by characteristics");
  s.data = {u.with_loci(edges), v.with_loci(edges)};

  DistributionDescriptor du, dv, shock;
  du.regular = [params](std::span<const double> x) { return hopf_ufan(params, x[0], x[1]); };
  du.kinks = edges;
  du.description = "rarefaction fan u";
  dv.regular = [params](std::span<const double> x) { return hopf_vfan(params, x[0], x[1]); };
  dv.kinks = edges;
  dv.description = "fan v";
  shock.regular = [params](std::span<const double> x) {
    return x[0] + x[1] > 0 ? params.v_r : params.v_l;
  };
  shock.kinks = {Hyperplane{{1.0, 1.0}, 0.0}};
  shock.description = "v_L + (v_R - v_L) Y(x + t)";
  s.expected = {{"U", du}, {"V", dv}, {"widetilde V", shock}};

  s.runner = [params, ch](const Scenario& sc, const ScenarioConfig& cfg) {
    ScenarioReport r;
    GroupLawReport law = check_group_law(*sc.action);
    Verdict g = compare("group law of the boost", ExpectedSource::Exact, 0.0,
                        std::max(law.identity_error, law.composition_error), law.composition_tol);
    g.pass = law.pass;
    r.add(g);

    // Residuals with exact jets along characteristics: x = x0 + t U0(x0).
    const Mollifier rho = Mollifier::bump();
    JetEvaluator jets = [params, ch, rho](std::span<const double> x, double eps) {
      double x0 = ch->foot(x[0], x[1], eps);
      double hp = rho.scaled(0, x0, eps);
      double duv = params.u_r - params.u_l, dvv = params.v_r - params.v_l;
      double u0 = ch->u(x[0], x[1], eps);
      double m = 1.0 + x[1] * duv * hp;
      double v0 = params.v_l + dvv * (u0 - params.u_l) / duv;
      return std::vector<double>{x[0], x[1], u0, duv * hp / m, -u0 * duv * hp / m,
                                 v0,   dvv * hp / m, -u0 * dvv * hp / m};
    };
    const Box box = Box::rect(-1.0, 1.0, 0.05, 1.0);
    for (std::size_t nu = 0; nu < 2; ++nu) {
      GenFunc res = residual_function(*sc.system, nu, jets, box).with_loci(sc.data[0].loci());
      add_residual(r, std::string("residual ") + (nu == 0 ? "u_t + u u_x" : "v_t + u v_x") + " negligible to order 3",
                   res, box, cfg, 3, ExpectedSource::Exact);
    }

    auto fan_battery = scenario_battery({0.1, 1.0}, {0.9, 0.5});
    add_association(r, "U associated with the rarefaction fan",
                    association_check(sc.data[0], sc.expected[0].second, fan_battery, cfg.ladder, 2e-2, cfg.pairing),
                    ExpectedSource::Published);
    add_association(r, "V associated with the fan",
                    association_check(sc.data[1], sc.expected[1].second, fan_battery, cfg.ladder, 2e-2, cfg.pairing),
                    ExpectedSource::Published);

    {
      ActionResult id = apply_action(sc.data, *sc.action, 0.0);
      double diff = 0.0;
      for (int kx = 0; kx <= 20; ++kx)
        for (int kt = 0; kt <= 10; ++kt) {
          std::vector<double> p{-1.0 + 0.1 * kx, 0.1 + 0.1 * kt};
          diff = std::max(diff, std::abs(id.functions[1](p, 1e-2) - sc.data[1](p, 1e-2)));
        }
      r.add(compare("eta = 0 leaves V unchanged", ExpectedSource::Exact, 0.0, diff, 1e-12));
    }

    {
      bool raised = false;
      try {
        (void)ch->v(0.0, -1.0, 1e-3);
      } catch (const DomainError&) {
        raised = true;
      }
      Verdict w = compare("evaluation inside the backward wedge is a domain error", ExpectedSource::Exact, 1.0,
                          raised ? 1.0 : 0.0, 0.0);
      r.add(w);
    }

    ActionResult act = apply_action(sc.data, *sc.action, params.eta, Box::rect(-3.0, 3.0, 0.0, 3.0));
    r.notes.insert(r.notes.end(), act.warnings.begin(), act.warnings.end());
    auto shock_battery = scenario_battery({-1.0, 1.0}, {0.6, 0.5});
    add_association(r, "widetilde V associated with the shock",
                    association_check(act.functions[1], sc.expected[2].second, shock_battery, cfg.ladder, 5e-2,
                                      cfg.pairing),
                    ExpectedSource::Published);
    return r;
  };
  return s;
}

}  // namespace genlie
