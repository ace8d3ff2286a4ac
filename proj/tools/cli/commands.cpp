#include "cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "cli/output.hpp"
#include "cli/verify.hpp"
#include "regbf/applications.hpp"
#include "regbf/bifurcation.hpp"
#include "regbf/dynamics.hpp"
#include "regbf/errors.hpp"
#include "regbf/expression.hpp"
#include "regbf/filippov.hpp"
#include "regbf/normalform.hpp"
#include "regbf/numerics.hpp"
#include "regbf/parallel.hpp"

namespace regbf::cli {

namespace {

namespace app = regbf::applications;
namespace bf = regbf::bifurcation;
namespace dyn = regbf::dynamics;
namespace fl = regbf::filippov;
using nlohmann::json;

const std::vector<double> kDefaultLadder{1e-3, 3e-4, 1e-4, 3e-5};

struct Context {
  const Config& cfg;
  const GlobalOptions& g;
  std::ostream& log;
  std::string command;
  std::string hash;
  std::vector<std::string> outputs;

  std::filesystem::path file(const std::string& name) {
    outputs.push_back(name);
    return g.out_dir / name;
  }

  // Sidecar with run metadata; the only file carrying a timestamp.
  void sidecar(const json& summary) {
    json meta;
    meta["command"] = command;
    meta["config"] = cfg.entries();
    meta["config_hash"] = hash;
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    meta["generated_utc"] = buf;
    meta["threads"] = g.threads;
    meta["fast"] = g.fast;
    meta["seedless"] = g.seedless;
    meta["outputs"] = outputs;
    meta["summary"] = summary;
    write_json(g.out_dir / (command + ".json"), meta);
  }
};

const std::set<std::string> kRegKeys{"reg.name", "reg.expr", "reg.k", "reg.beta", "reg.odd"};

std::set<std::string> keys(std::initializer_list<std::set<std::string>> groups) {
  std::set<std::string> out{"system"};
  for (const auto& g : groups) out.insert(g.begin(), g.end());
  return out;
}

void check_eps(const Config& cfg, const std::vector<double>& eps) {
  const bool any = cfg.get_bool("sweep.allow_any_eps", false);
  for (const double e : eps) {
    if (!(e > 0.0)) throw ConfigError(fmt::format("eps must be positive, got {}", e));
    if (!any && (e < 3e-5 || e > 1e-2)) {
      throw ConfigError(fmt::format("eps = {} outside [3e-5, 1e-2]; set sweep.allow_any_eps = true to override", e));
    }
  }
}

Interval interval_key(const Config& cfg, const std::string& key, Interval fallback) {
  const auto v = cfg.get_list(key, {fallback.lo, fallback.hi});
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(fmt::format("config key '{}': expected lo,hi with lo < hi", key));
  return {v[0], v[1]};
}

normalform::NormalFormParams nf_params(const Config& cfg) {
  normalform::NormalFormParams p;
  p.tau = cfg.get_double("system.normalform.tau", p.tau);
  p.delta = cfg.get_double("system.normalform.delta", p.delta);
  p.gamma = cfg.get_double("system.normalform.gamma", p.gamma);
  p.sign_lower = cfg.get_int("system.normalform.sign_lower", p.sign_lower);
  p.validate();
  return p;
}
const std::set<std::string> kNfKeys{"system.normalform.tau", "system.normalform.delta", "system.normalform.gamma",
                                    "system.normalform.sign_lower"};

app::GauseParams gause_params(const Config& cfg) {
  app::GauseParams p;
  p.r = cfg.get_double("system.gause.r", p.r);
  p.lambda = cfg.get_double("system.gause.lambda", p.lambda);
  p.h = cfg.get_double("system.gause.h", p.h);
  p.m = cfg.get_double("system.gause.m", p.m);
  p.e_tilde = cfg.get_double("system.gause.e_tilde", p.e_tilde);
  p.mu = cfg.get_double("system.gause.mu", p.mu);
  p.validate();
  return p;
}
const std::set<std::string> kGauseKeys{"system.gause.r", "system.gause.lambda", "system.gause.h",
                                       "system.gause.m", "system.gause.e_tilde", "system.gause.mu"};

app::StickSlipParams ss_params(const Config& cfg) {
  app::StickSlipParams p;
  p.mu_s = cfg.get_double("system.stickslip.mu_s", p.mu_s);
  p.mu_m = cfg.get_double("system.stickslip.mu_m", p.mu_m);
  p.v_m = cfg.get_double("system.stickslip.v_m", p.v_m);
  p.alpha = cfg.get_double("system.stickslip.alpha", p.alpha);
  p.validate();
  return p;
}
const std::set<std::string> kSsKeys{"system.stickslip.mu_s", "system.stickslip.mu_m", "system.stickslip.v_m",
                                    "system.stickslip.alpha"};

// User PWS system: expressions in x, y and the parameter a.
fl::PwsSystem custom_pws(const Config& cfg) {
  auto field = [&](const std::string& side) {
    const auto ex = Expression::parse(cfg.get_string("system.custom." + side + "_x", ""), {"x", "y", "a"});
    const auto ey = Expression::parse(cfg.get_string("system.custom." + side + "_y", ""), {"x", "y", "a"});
    fl::PlanarVectorField f;
    f.value = [ex, ey](const Vec2& z, double a) {
      const double v[] = {z.x, z.y, a};
      return Vec2{ex.eval(v), ey.eval(v)};
    };
    return f;
  };
  for (const char* k : {"zplus_x", "zplus_y", "zminus_x", "zminus_y"}) {
    if (!cfg.has(std::string("system.custom.") + k)) throw ConfigError(std::string("custom system needs system.custom.") + k);
  }
  fl::PwsSystem sys;
  sys.name = "custom";
  sys.zplus = field("zplus");
  sys.zminus = field("zminus");
  const auto d = cfg.get_list("system.custom.domain", {-2.0, 2.0, -2.0, 2.0});
  if (d.size() != 4) throw ConfigError("system.custom.domain must be x_min,x_max,y_min,y_max");
  sys.domain = {d[0], d[1], d[2], d[3]};
  sys.validate();
  return sys;
}
const std::set<std::string> kCustomKeys{"system.custom.zplus_x", "system.custom.zplus_y", "system.custom.zminus_x",
                                        "system.custom.zminus_y", "system.custom.domain"};

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"slope_stderr", f.slope_stderr}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

json vec_json(const Vec2& v) { return json::array({v.x, v.y}); }

CsvTable polyline_csv(const Polyline& pts) {
  CsvTable t({"x[-]", "y[-]"});
  for (const auto& z : pts) t.add_row({z.x, z.y});
  return t;
}

// ---------------------------------------------------------------- validate-reg

int cmd_validate_reg(Context& c) {
  c.cfg.require_known(keys({kRegKeys}));
  const auto reg = reg_from_config(c.cfg);
  const auto rep = validate_regularization(reg);
  json s;
  s["name"] = rep.name;
  s["declared"] = {{"k", reg.k}, {"beta", reg.beta}, {"odd", reg.odd}};
  s["min_derivative"] = rep.min_derivative;
  s["monotonicity_violations"] = rep.monotonicity_violations.size();
  s["upper_limit_residual"] = rep.upper_limit_residual;
  s["lower_limit_residual"] = rep.lower_limit_residual;
  s["k_fit"] = rep.k_fit;
  s["beta_fit"] = rep.beta_fit;
  s["tail_exponent_ok"] = rep.tail_exponent_ok;
  s["tail_coefficient_ok"] = rep.tail_coefficient_ok;
  s["odd_checked"] = rep.odd_checked;
  s["odd_residual"] = rep.odd_residual;
  s["failures"] = rep.failures;
  s["passed"] = rep.passed();
  write_json(c.file("validate_reg_report.json"), s);
  c.sidecar(s);
  c.log << fmt::format("{}: k_fit {:.4g}, beta_fit {:.4g}: {}\n", rep.name, rep.k_fit, rep.beta_fit,
                       rep.passed() ? "valid" : "invalid");
  for (const auto& f : rep.failures) c.log << "  " << f << "\n";
  return rep.passed() ? kOk : kCriterionFailure;
}

// ---------------------------------------------------------------- pws-report

int cmd_pws_report(Context& c) {
  c.cfg.require_known(keys({kNfKeys, kGauseKeys, kSsKeys, kCustomKeys,
                            {"sweep.param", "sweep.bf_window", "sweep.bf_probe", "sweep.samples"}}));
  const std::string system = c.cfg.get_string("system", "normalform");
  fl::PwsSystem sys;
  double param = 0.0;
  Interval window;
  if (system == "normalform") {
    sys = normalform::pws_limit(nf_params(c.cfg));
    param = 0.1;
    window = {-0.5, 0.5};
  } else if (system == "gause") {
    const auto p = gause_params(c.cfg);
    sys = app::gause_pws(p);
    param = p.mu;
    window = {0.0, 1.0};
  } else if (system == "stickslip") {
    const auto p = ss_params(c.cfg);
    sys = app::stickslip_pws(p);
    param = p.alpha;
    window = {-0.5, 0.5};
  } else if (system == "custom") {
    sys = custom_pws(c.cfg);
    window = {-0.5, 0.5};
  } else {
    throw ConfigError("unknown system '" + system + "'");
  }
  param = c.cfg.get_double("sweep.param", param);
  window = interval_key(c.cfg, "sweep.bf_window", window);
  const int samples = c.cfg.get_int("sweep.samples", 4001);
  if (samples < 11) throw ConfigError("sweep.samples must be at least 11");
  const Interval xs{sys.domain.x_min, sys.domain.x_max};

  json s;
  s["system"] = system;
  s["param"] = param;
  s["folds"] = json::array();
  for (const auto& f : fl::find_folds(sys, xs, param, samples)) {
    s["folds"].push_back({{"x", f.x}, {"side", fl::to_string(f.side)}, {"visibility", fl::to_string(f.visibility)},
                          {"second_lie", f.second_lie}});
  }
  // Maximal crossing and sliding runs on the sampling grid; tangency samples only close a run.
  s["segments"] = json::array();
  auto x_at = [&](int i) { return xs.lo + xs.width() * i / (samples - 1); };
  int start = -1;
  fl::PointType run_type = fl::PointType::Tangency;
  auto close = [&](int end) {
    if (start < 0 || end <= start) return;
    json seg{{"type", fl::to_string(run_type)}, {"x_lo", x_at(start)}, {"x_hi", x_at(end)}};
    if (run_type == fl::PointType::Sliding) {
      seg["sliding_field_mid"] = fl::sliding_field(sys, 0.5 * (x_at(start) + x_at(end)), param);
    }
    s["segments"].push_back(seg);
  };
  for (int i = 0; i < samples; ++i) {
    const fl::PointType t = fl::classify_point(sys, x_at(i), param);
    if (t == fl::PointType::Tangency) {
      close(i);
      start = -1;
    } else if (start < 0) {
      start = i;
      run_type = t;
    } else if (t != run_type) {
      close(i);
      start = i;
      run_type = t;
    }
  }
  close(samples - 1);
  s["sliding_equilibria"] = json::array();
  for (const auto& e : fl::sliding_equilibria(sys, param, xs, samples, true)) {
    s["sliding_equilibria"].push_back({{"x", e.x},
                                       {"stability", fl::to_string(e.stability)},
                                       {"derivative", e.derivative},
                                       {"admissible", e.admissible}});
  }
  const auto cand = fl::detect_bf(sys, window);
  if (!cand) {
    s["bf"] = nullptr;
  } else {
    json b{{"alpha_bf", cand->alpha_bf},
           {"z_bf", vec_json(cand->z_bf)},
           {"A", cand->A},
           {"B", cand->B},
           {"lower_normal", cand->lower_normal},
           {"determinant_condition", cand->determinant_condition},
           {"sliding_derivative", cand->sliding_derivative},
           {"degenerate", cand->degenerate()},
           {"degenerate_conditions", cand->degenerate_conditions}};
    const double offset = std::abs(param - cand->alpha_bf);
    const double probe = c.cfg.get_double("sweep.bf_probe", offset > 1e-6 ? offset : 0.05);
    const auto cl = fl::classify_bf(sys, *cand, probe);
    json k{{"type", fl::to_string(cl.type)}, {"probe_alpha", cl.probe_alpha}, {"hbf_degenerate", cl.hbf_degenerate},
           {"note", cl.note}};
    if (cl.x_fold) k["x_fold"] = *cl.x_fold;
    if (cl.x_drop) k["x_drop"] = *cl.x_drop;
    if (cl.x_sliding_eq) k["x_sliding_eq"] = *cl.x_sliding_eq;
    b["classification"] = k;
    s["bf"] = b;
  }
  write_json(c.file("pws_report.json"), s);
  c.sidecar({{"folds", s["folds"].size()}, {"bf_found", cand.has_value()}});
  c.log << fmt::format("{} at param {}: {} folds, {} sliding equilibria, BF {}\n", system, param, s["folds"].size(),
                       s["sliding_equilibria"].size(),
                       cand ? fmt::format("at {:.10g} ({})", cand->alpha_bf, s["bf"]["classification"]["type"].get<std::string>())
                            : "not found");
  return kOk;
}

// ---------------------------------------------------------------- desing-diagram

int cmd_desing_diagram(Context& c) {
  c.cfg.require_known(keys({{"system.desing.beta", "system.desing.tau", "system.desing.delta", "sweep.k",
                             "sweep.gamma", "sweep.homoclinic"}}));
  const auto ks = c.cfg.get_list("sweep.k", {1.0});
  std::vector<double> fallback;
  for (int i = 0; i < 40; ++i) fallback.push_back(-1.0 + 1.95 * i / 39.0);
  const auto grid = c.cfg.get_list("sweep.gamma", fallback);
  const bool hom = c.cfg.get_bool("sweep.homoclinic", !c.g.fast);
  CsvTable t({"curve", "k[-]", "gamma[-]", "mu_hat[-]"});
  SvgPlot plot{"Bifurcation diagram of the desingularized system", "gamma", "mu_hat = eps^(-k/(k+1)) mu"};
  json s;
  s["k"] = json::array();
  for (const double kd : ks) {
    const int k = static_cast<int>(kd);
    if (k != kd || k < 1) throw ConfigError("sweep.k entries must be positive integers");
    const bf::DesingConstants dc{k, c.cfg.get_double("system.desing.beta", 1.0), c.cfg.get_double("system.desing.tau", 1.0),
                                 c.cfg.get_double("system.desing.delta", 1.0)};
    const auto d = bf::build_diagram(dc, grid, hom);
    SvgSeries ah{fmt::format("AH k={}", k)}, sn{fmt::format("SN k={}", k)}, hm{fmt::format("HOM k={}", k)};
    for (const auto& [g, m] : d.ah_curve) {
      t.add_row("AH", {kd, g, m});
      ah.x.push_back(g);
      ah.y.push_back(m);
    }
    for (const auto& [g, m] : d.sn_curve) {
      t.add_row("SN", {kd, g, m});
      sn.x.push_back(g);
      sn.y.push_back(m);
    }
    t.add_row("BT", {kd, d.bt_point.second, d.bt_point.first});
    for (const auto& [g, m] : d.hom_samples) {
      t.add_row("HOM", {kd, g, m});
      hm.x.push_back(g);
      hm.y.push_back(m);
    }
    hm.markers = true;
    plot.series.push_back(ah);
    if (!sn.x.empty()) plot.series.push_back(sn);
    plot.series.push_back({fmt::format("BT k={}", k), {d.bt_point.second}, {d.bt_point.first}, true});
    if (!hm.x.empty()) plot.series.push_back(hm);
    s["k"].push_back({{"k", k},
                      {"bt_point", {{"mu_hat", d.bt_point.first}, {"gamma", d.bt_point.second}}},
                      {"ah_rows", d.ah_curve.size()},
                      {"sn_rows", d.sn_curve.size()},
                      {"hom_rows", d.hom_samples.size()}});
    c.log << fmt::format("k={}: BT ({:.6g}, {:.6g}), {} AH, {} SN, {} homoclinic samples\n", k, d.bt_point.first,
                         d.bt_point.second, d.ah_curve.size(), d.sn_curve.size(), d.hom_samples.size());
  }
  t.write(c.file("desing_diagram.csv"));
  plot.write(c.file("desing_diagram.svg"), c.hash);
  c.sidecar(s);
  return kOk;
}

// ---------------------------------------------------------------- hopf-scaling

int cmd_hopf_scaling(Context& c) {
  c.cfg.require_known(keys({kRegKeys, kNfKeys, kGauseKeys, kSsKeys, {"sweep.eps", "sweep.allow_any_eps"}}));
  const std::string system = c.cfg.get_string("system", "normalform");
  const auto reg = reg_from_config(c.cfg);
  const auto ladder = c.cfg.get_list("sweep.eps", kDefaultLadder);
  check_eps(c.cfg, ladder);
  if (ladder.size() < 2) throw ConfigError("sweep.eps needs at least two values");
  const double expo = reg.k / (reg.k + 1.0);
  std::vector<double> values;
  double analytic = std::numeric_limits<double>::quiet_NaN();
  std::string quantity;
  if (system == "normalform") {
    const auto p = nf_params(c.cfg);
    quantity = "mu_ah";
    analytic = bf::hopf_curve_hat(p.gamma, {reg.k, reg.beta, p.tau, p.delta});
    values = parallel_map(ladder.size(), [&](std::size_t i) { return bf::hopf_full_numeric(p, reg, ladder[i]).param; });
  } else if (system == "gause") {
    const auto p = gause_params(c.cfg);
    quantity = "|mu_ah - mu_bf|";
    const double mu_bf = app::gause_mu_bf(p);
    values = parallel_map(ladder.size(), [&](std::size_t i) { return std::abs(app::gause_hopf(p, reg, ladder[i]).param - mu_bf); });
  } else if (system == "stickslip") {
    const app::StickSlipModel m(ss_params(c.cfg), reg);
    quantity = "alpha_ah";
    analytic = app::stickslip_alpha_ah_prefactor(m.params(), reg);
    values = parallel_map(ladder.size(), [&](std::size_t i) { return app::stickslip_alpha_ah(m, ladder[i]).numeric; });
  } else {
    throw ConfigError("hopf-scaling supports normalform, gause and stickslip");
  }
  CsvTable t({"eps[-]", "value[-]", "value_over_eps_pow[-]"});
  for (std::size_t i = 0; i < ladder.size(); ++i) t.add_row({ladder[i], values[i], values[i] / std::pow(ladder[i], expo)});
  t.write(c.file("hopf_scaling.csv"));
  json s{{"system", system}, {"quantity", quantity}, {"expected_slope", expo}};
  const bool positive = std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
  if (positive) {
    const auto fit = fit_power_law(ladder, values);
    s["fit"] = fit_json(fit);
    s["slope_interval_95"] = {fit.slope - 2.0 * fit.slope_stderr, fit.slope + 2.0 * fit.slope_stderr};
    s["prefactor_fit"] = std::exp(fit.intercept);
    c.log << fmt::format("{} slope {:.4f} +- {:.2g} (expected {:.4f}), prefactor {:.5g}\n", quantity, fit.slope,
                         2.0 * fit.slope_stderr, expo, std::exp(fit.intercept));
    SvgPlot plot{"Hopf scaling", "eps", quantity, true, true};
    plot.series.push_back({quantity, ladder, values, true});
    std::vector<double> line;
    for (const double e : ladder) line.push_back(std::exp(fit.intercept) * std::pow(e, fit.slope));
    plot.series.push_back({fmt::format("fit slope {:.3f}", fit.slope), ladder, line});
    plot.write(c.file("hopf_scaling.svg"), c.hash);
  } else {
    s["fit"] = nullptr;
    c.log << "values not all positive; no power-law fit\n";
  }
  if (std::isfinite(analytic)) {
    s["prefactor_analytic"] = analytic;
    if (positive && analytic != 0.0) s["prefactor_relative_error"] = s["prefactor_fit"].get<double>() / analytic - 1.0;
  }
  c.sidecar(s);
  return kOk;
}

// ---------------------------------------------------------------- relax-converge

int cmd_relax_converge(Context& c) {
  c.cfg.require_known(keys({kRegKeys, kNfKeys, {"sweep.mu", "sweep.eps", "sweep.allow_any_eps"}}));
  const auto p = nf_params(c.cfg);
  const auto reg = reg_from_config(c.cfg);
  const double mu = c.cfg.get_double("sweep.mu", 0.3);
  const auto ladder = c.cfg.get_list("sweep.eps", kDefaultLadder);
  check_eps(c.cfg, ladder);
  const auto st = dyn::relax_convergence_study(p, reg, mu, ladder);
  CsvTable t({"eps[-]", "hausdorff[-]", "period[t]", "floquet[-]", "found[bool]"});
  std::vector<double> xs, hs;
  for (const auto& r : st.rows) {
    t.add_row({r.eps, r.found ? r.hausdorff : NAN, r.found ? r.period : NAN, r.found ? r.floquet : NAN, r.found ? 1.0 : 0.0});
    if (r.found) {
      xs.push_back(r.eps);
      hs.push_back(r.hausdorff);
    }
  }
  t.write(c.file("relax_converge.csv"));
  SvgPlot plot{"Hausdorff distance to the PWS cycle", "eps", "H", true, true};
  plot.series.push_back({"H(eps)", xs, hs, true});
  plot.write(c.file("relax_converge.svg"), c.hash);
  json s{{"mu", mu}, {"expected_slope", st.expected_slope}, {"monotone", st.monotone}, {"partial", st.partial}};
  s["fit"] = xs.size() >= 2 ? fit_json(st.fit) : json(nullptr);
  c.sidecar(s);
  c.log << fmt::format("slope {:.4f} (expected {:.4f}), R^2 {:.4f}, monotone {}\n", st.fit.slope, st.expected_slope,
                       st.fit.r_squared, st.monotone);
  return st.partial ? kNumericalFailure : kOk;
}

// ---------------------------------------------------------------- cycle-branch

int cmd_cycle_branch(Context& c) {
  c.cfg.require_known(keys({kRegKeys, kNfKeys, {"sweep.eps", "sweep.mu_window", "sweep.steps", "sweep.allow_any_eps"}}));
  const auto p = nf_params(c.cfg);
  const auto reg = reg_from_config(c.cfg);
  const auto eps_list = c.cfg.get_list("sweep.eps", {1e-3});
  if (eps_list.size() != 1) throw ConfigError("cycle-branch takes a single sweep.eps");
  check_eps(c.cfg, eps_list);
  const double eps = eps_list[0];
  const Interval win = interval_key(c.cfg, "sweep.mu_window", {0.02, 0.3});
  const int steps = c.cfg.get_int("sweep.steps", 40);
  const auto b = dyn::continue_cycle_in_mu(p, reg, eps, win, steps);
  CsvTable t({"mu[-]", "amplitude[-]", "period[t]", "floquet[-]"});
  SvgSeries amp{"amplitude"};
  amp.markers = true;
  for (const auto& sm : b.samples) {
    t.add_row({sm.mu, sm.amplitude, sm.cycle.period, sm.cycle.floquet});
    amp.x.push_back(sm.mu);
    amp.y.push_back(sm.amplitude);
  }
  t.write(c.file("cycle_branch.csv"));
  const double scale = std::pow(eps, reg.k / (reg.k + 1.0));
  SvgPlot plot{fmt::format("Cycle branch at eps = {:g}", eps), "mu", "amplitude (max y)"};
  plot.series.push_back(amp);
  plot.vlines.push_back({scale, "eps^(k/(k+1))"});
  plot.write(c.file("cycle_branch.svg"), c.hash);
  json s{{"eps", eps}, {"samples", b.samples.size()}, {"terminated_by", dyn::to_string(b.terminated_by)},
         {"diagnostic", b.diagnostic}, {"hopf_scale", scale}};
  if (!b.samples.empty()) {
    const auto& top = b.samples.back();
    const auto pws = normalform::build_pws_cycle(p, top.mu);
    dyn::LimitCycle tmp;
    tmp.points = pws.points;
    s["top"] = {{"mu", top.mu}, {"diameter", top.cycle.diameter()}, {"pws_diameter", tmp.diameter()},
                {"relative_difference", top.cycle.diameter() / tmp.diameter() - 1.0}};
    c.log << fmt::format("{} cycles on [{:.4g}, {:.4g}], terminated by {}; top diameter {:.5g} vs PWS {:.5g}\n",
                         b.samples.size(), b.samples.front().mu, top.mu, dyn::to_string(b.terminated_by),
                         top.cycle.diameter(), tmp.diameter());
  }
  c.sidecar(s);
  return b.samples.empty() ? kNumericalFailure : kOk;
}

// ---------------------------------------------------------------- gause

int cmd_gause(Context& c) {
  c.cfg.require_known(keys({kRegKeys, kGauseKeys,
                            {"sweep.eps", "sweep.hopf_eps", "sweep.starts", "sweep.box", "sweep.mu_stable",
                             "sweep.allow_any_eps"}}));
  const auto p = gause_params(c.cfg);
  const auto reg = reg_from_config(c.cfg);
  const double eps = c.cfg.get_double("sweep.eps", 1e-2);
  check_eps(c.cfg, {eps});
  json s;
  s["mu_bf"] = app::gause_mu_bf(p);
  s["h_star"] = app::gause_h_star(p);
  const auto sys = app::gause_pws(p);
  if (const auto cand = fl::detect_bf(sys, {0.0, 1.0})) {
    const auto cl = fl::classify_bf(sys, *cand, 0.05);
    s["bf"] = {{"alpha_bf", cand->alpha_bf}, {"z_bf", vec_json(cand->z_bf)}, {"A", cand->A}, {"B", cand->B},
               {"type", fl::to_string(cl.type)}};
  }
  const auto cyc = app::gause_cycle(p, reg, eps);
  if (cyc.cycle) {
    s["cycle"] = {{"mu", p.mu}, {"eps", eps}, {"period", cyc.cycle->period}, {"floquet", cyc.cycle->floquet},
                  {"anchor", vec_json(cyc.cycle->anchor)}};
    polyline_csv(cyc.cycle->points).write(c.file("gause_cycle.csv"));
  } else {
    s["cycle"] = {{"mu", p.mu}, {"eps", eps}, {"diagnostic", cyc.diagnostic}};
  }
  if (!c.g.fast) {
    const auto box = c.cfg.get_list("sweep.box", {0.0, 3.0, -0.1, 2.0});
    if (box.size() != 4) throw ConfigError("sweep.box must be x_min,x_max,y_min,y_max");
    const auto ms = app::gause_multistart(p, reg, eps, c.cfg.get_int("sweep.starts", 10), {box[0], box[1], box[2], box[3]});
    json starts = json::array();
    for (std::size_t i = 0; i < ms.starts.size(); ++i) {
      starts.push_back({{"start", vec_json(ms.starts[i])},
                        {"anchor", ms.anchors[i] ? vec_json(*ms.anchors[i]) : json(nullptr)},
                        {"outcome", ms.diagnostics[i]}});
    }
    s["multistart"] = {{"all_converged", ms.all_converged}, {"max_anchor_spread", ms.max_anchor_spread}, {"starts", starts}};
    auto q = p;
    q.mu = c.cfg.get_double("sweep.mu_stable", 1.0);
    const auto none = app::gause_cycle(q, reg, eps);
    const auto eq = app::gause_equilibrium_check(q, reg, eps);
    s["stable_regime"] = {{"mu", q.mu}, {"cycle_found", none.cycle.has_value()}, {"equilibrium", vec_json(eq.equilibrium)},
                          {"max_real_eigenvalue", eq.eigenvalues.max_real()}, {"attracting", eq.attracting}};
    const auto ladder = c.cfg.get_list("sweep.hopf_eps", kDefaultLadder);
    check_eps(c.cfg, ladder);
    const double mu_bf = app::gause_mu_bf(p);
    CsvTable t({"eps[-]", "mu_ah[-]", "mu_ah_minus_mu_bf[-]"});
    std::vector<double> gaps;
    for (const double e : ladder) {
      const double m = app::gause_hopf(p, reg, e).param;
      t.add_row({e, m, m - mu_bf});
      gaps.push_back(std::abs(m - mu_bf));
    }
    t.write(c.file("gause_hopf.csv"));
    if (ladder.size() >= 2) s["hopf_fit"] = fit_json(fit_power_law(ladder, gaps));
  }
  write_json(c.file("gause_report.json"), s);
  c.sidecar(s);
  c.log << fmt::format("mu_bf {:.10g}; cycle at mu {}: {}\n", s["mu_bf"].get<double>(), p.mu,
                       cyc.cycle ? fmt::format("period {:.5g}", cyc.cycle->period) : cyc.diagnostic);
  return kOk;
}

// ---------------------------------------------------------------- stickslip

int cmd_stickslip(Context& c) {
  c.cfg.require_known(keys({kRegKeys, kSsKeys, {"sweep.eps", "sweep.hopf_eps", "sweep.allow_any_eps"}}));
  const app::StickSlipModel m(ss_params(c.cfg), reg_from_config(c.cfg));
  const double eps = c.cfg.get_double("sweep.eps", 1e-2);
  check_eps(c.cfg, {eps});
  const double alpha = m.params().alpha;
  json s{{"mu_plus_prime_0", app::stribeck_deriv(m.params(), 0.0)},
         {"alpha_ah_prefactor", app::stickslip_alpha_ah_prefactor(m.params(), m.reg())}};
  const auto cp = app::stickslip_cycle(m, alpha, eps);
  const auto cm = app::stickslip_cycle(m, -alpha, eps);
  if (cp.cycle) {
    s["cycle"] = {{"alpha", alpha}, {"period", cp.cycle->period}, {"floquet", cp.cycle->floquet}};
    polyline_csv(cp.cycle->points).write(c.file("stickslip_cycle.csv"));
  } else {
    s["cycle"] = {{"alpha", alpha}, {"diagnostic", cp.diagnostic}};
  }
  if (cp.cycle && cm.cycle) {
    Polyline mapped;
    for (const auto& z : cm.cycle->points) mapped.push_back(-z);
    s["symmetry_hausdorff"] = dyn::hausdorff(cp.cycle->points, mapped, 1e-3);
  }
  if (!c.g.fast) {
    const auto ladder = c.cfg.get_list("sweep.hopf_eps", kDefaultLadder);
    check_eps(c.cfg, ladder);
    CsvTable t({"eps[-]", "alpha_ah_numeric[-]", "alpha_ah_analytic[-]"});
    std::vector<double> num;
    for (const double e : ladder) {
      const auto a = app::stickslip_alpha_ah(m, e);
      t.add_row({e, a.numeric, a.analytic});
      num.push_back(a.numeric);
    }
    t.write(c.file("stickslip_hopf.csv"));
    if (ladder.size() >= 2) {
      const auto fit = fit_power_law(ladder, num);
      s["hopf_fit"] = fit_json(fit);
      s["hopf_prefactor_fit"] = std::exp(fit.intercept);
    }
  }
  write_json(c.file("stickslip_report.json"), s);
  c.sidecar(s);
  c.log << fmt::format("mu_+'(0) = {:.6g}; cycle at alpha {}: {}\n", s["mu_plus_prime_0"].get<double>(), alpha,
                       cp.cycle ? fmt::format("period {:.5g}", cp.cycle->period) : cp.diagnostic);
  return kOk;
}

// ---------------------------------------------------------------- creep

int cmd_creep(Context& c) {
  c.cfg.require_known(keys({kRegKeys, kSsKeys, {"sweep.eps", "sweep.a", "sweep.allow_any_eps"}}));
  const app::StickSlipModel m(ss_params(c.cfg), reg_from_config(c.cfg));
  const auto ladder = c.cfg.get_list("sweep.eps", {1e-2, 1e-3});
  check_eps(c.cfg, ladder);
  const double a = c.cfg.get_double("sweep.a", 0.5);
  const auto reps = parallel_map(ladder.size(), [&](std::size_t i) { return app::creep_study(m, ladder[i], a); });
  CsvTable t({"eps[-]", "alpha[-]", "manifold_residual[-]", "literal_residual[-]", "equilibrium_y_over_alpha[-]",
              "halving_time[t]"});
  json rows = json::array();
  for (const auto& r : reps) {
    t.add_row({r.eps, r.eps * r.a, r.manifold_residual, r.literal_residual, r.equilibrium_y_over_alpha, r.halving_time});
    rows.push_back({{"eps", r.eps}, {"manifold_residual_over_eps2", r.manifold_residual / (r.eps * r.eps)},
                    {"halving_time", r.halving_time}, {"equilibrium", vec_json(r.equilibrium)}});
    c.log << fmt::format("eps {:g}: residual {:.3e} ({:.3g} eps^2), halving time {:.5g}\n", r.eps, r.manifold_residual,
                         r.manifold_residual / (r.eps * r.eps), r.halving_time);
  }
  t.write(c.file("creep.csv"));
  c.sidecar({{"a", a}, {"rows", rows}});
  return kOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(Context& c) {
  c.cfg.require_known({"verify.corrupt_beta", "verify.sampler", "verify.seed", "verify.only"});
  VerifyOptions o;
  o.fast = c.g.fast;
  o.corrupt_beta = c.cfg.get_double("verify.corrupt_beta", 1.0);
  const std::string sampler = c.cfg.get_string("verify.sampler", "halton");
  if (sampler == "random") {
    if (c.g.seedless) throw ConfigError("--seedless forbids verify.sampler = random");
    o.random_points = true;
    o.seed = static_cast<std::uint64_t>(c.cfg.get_int("verify.seed", 1));
  } else if (sampler != "halton") {
    throw ConfigError("verify.sampler must be halton or random");
  }
  for (const double id : c.cfg.get_list("verify.only", {})) o.only.push_back(static_cast<int>(id));
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_verify(o, [&](const CriterionResult& r) { c.log << format_line(r) << std::endl; });
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json s;
  s["criteria"] = json::array();
  bool ok = true;
  for (const auto& r : results) {
    s["criteria"].push_back(to_json(r));
    if (!r.skipped && !r.passed()) ok = false;
  }
  s["total_seconds"] = total;
  s["passed"] = ok;
  c.sidecar(s);
  c.log << fmt::format("{} in {:.1f} s\n", ok ? "all criteria passed" : "criterion failure", total);
  return ok ? kOk : kCriterionFailure;
}

const std::map<std::string, int (*)(Context&)>& table() {
  static const std::map<std::string, int (*)(Context&)> t{
      {"validate-reg", cmd_validate_reg}, {"pws-report", cmd_pws_report},     {"desing-diagram", cmd_desing_diagram},
      {"hopf-scaling", cmd_hopf_scaling}, {"relax-converge", cmd_relax_converge}, {"cycle-branch", cmd_cycle_branch},
      {"gause", cmd_gause},               {"stickslip", cmd_stickslip},       {"creep", cmd_creep},
      {"verify", cmd_verify}};
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate-reg", "pws-report", "desing-diagram", "hopf-scaling",
                                              "relax-converge", "cycle-branch", "gause", "stickslip", "creep", "verify"};
  return names;
}

RegularizationFunction reg_from_config(const Config& cfg, const std::string& fallback) {
  if (cfg.has("reg.expr")) {
    if (cfg.has("reg.name")) throw ConfigError("set either reg.name or reg.expr, not both");
    if (!cfg.has("reg.k") || !cfg.has("reg.beta")) throw ConfigError("reg.expr needs declared reg.k and reg.beta");
    return make_expression(cfg.get_string("reg.expr", ""), cfg.get_int("reg.k", 1), cfg.get_double("reg.beta", 1.0),
                           cfg.get_bool("reg.odd", false));
  }
  return make_builtin(cfg.get_string("reg.name", fallback));
}

int run_command(const std::string& name, const Config& cfg, const GlobalOptions& g, std::ostream& log) {
  const auto it = table().find(name);
  if (it == table().end()) throw ConfigError("unknown command '" + name + "'");
  if (g.threads < 1) throw ConfigError("--threads must be at least 1");
  set_default_threads(g.threads);
  Context c{cfg, g, log, name, config_hash(cfg), {}};
  return it->second(c);
}

int dispatch(const std::string& name, const Config& cfg, const GlobalOptions& g, std::ostream& log,
             std::ostream& err) {
  try {
    return run_command(name, cfg, g, log);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace regbf::cli
