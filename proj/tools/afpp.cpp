#include "afpp/bifurcation.hpp"
#include "afpp/checks.hpp"
#include "afpp/equilibria.hpp"
#include "afpp/error.hpp"
#include "afpp/global_dynamics.hpp"
#include "afpp/io.hpp"
#include "afpp/model.hpp"
#include "afpp/optimal_control.hpp"
#include "afpp/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using afpp::io::fmt;
using afpp::io::json;

namespace {

using Rows = std::vector<std::vector<std::string>>;

struct Config {
  std::string params_file;
  std::vector<std::string> sets;
  std::string out = ".";
  std::uint64_t seed = 42;
  bool allow_delta_le_m = false;
  double tol_hyperbolic = 1e-7;
  double tol_focus = 1e-9;
  double tol_rtol = 1e-8;
  double tol_atol = 1e-10;
  double tol_newton = 1e-12;
  double tol_event = afpp::kBifurcationTol;
  double tol_kkt = 1e-7;

  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  afpp::ModelParams params;
  json params_json;

  afpp::ClassifyTolerances classify() const { return {tol_hyperbolic, tol_focus}; }

  afpp::SimulationOptions simulation() const {
    afpp::SimulationOptions o;
    o.stepper.rtol = tol_rtol;
    o.stepper.atol = tol_atol;
    return o;
  }

  json tolerances() const {
    return {{"hyperbolic", tol_hyperbolic}, {"focus_relative", tol_focus}, {"rtol", tol_rtol},
            {"atol", tol_atol},             {"newton", tol_newton},       {"event", tol_event},
            {"kkt", tol_kkt},               {"seed", seed}};
  }

  json meta(const std::string& command, bool truncated = false) const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return afpp::io::metadata(command, params_json, tolerances(), wall, truncated);
  }

  fs::path path(const std::string& name) const { return fs::path(out) / name; }
};

void add_common(CLI::App* sub, Config& c) {
  sub->add_option("--params", c.params_file, "JSON object of model parameters");
  sub->add_option("--set", c.sets, "Parameter override key=value (repeatable)");
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "Seed for randomized suites")->capture_default_str();
  sub->add_flag("--allow-delta-le-m", c.allow_delta_le_m, "Accept delta <= m");
  sub->add_option("--tol-hyperbolic", c.tol_hyperbolic, "|Re lambda| threshold")->capture_default_str();
  sub->add_option("--tol-focus", c.tol_focus, "Relative |Im lambda| threshold")->capture_default_str();
  sub->add_option("--tol-rtol", c.tol_rtol, "Integrator relative tolerance")->capture_default_str();
  sub->add_option("--tol-atol", c.tol_atol, "Integrator absolute tolerance")->capture_default_str();
  sub->add_option("--tol-newton", c.tol_newton, "Continuation corrector tolerance")->capture_default_str();
  sub->add_option("--tol-event", c.tol_event, "Bifurcation bracket width")->capture_default_str();
  sub->add_option("--tol-kkt", c.tol_kkt, "NLP optimality tolerance")->capture_default_str();
}

void resolve_params(Config& c) {
  json j = json::object();
  if (!c.params_file.empty()) j = afpp::io::read_json_file(c.params_file);
  afpp::ModelParams p = afpp::io::params_from_json(j);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw afpp::DomainError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
      throw afpp::DomainError("--set value for '" + key + "' is not a number");
    }
    p = afpp::io::params_from_json(json{{key, value}}, p);
  }
  p.validate({c.allow_delta_le_m});
  c.params = p;
  c.params_json = afpp::io::to_json(p);
}

void prepare_out(const Config& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (!fs::is_directory(c.out)) throw afpp::DomainError("cannot create output directory '" + c.out + "'");
}

std::vector<std::string> eigen_cells(const afpp::EigenPair& ev) {
  return {fmt(ev[0].real()), fmt(ev[0].imag()), fmt(ev[1].real()), fmt(ev[1].imag())};
}

afpp::State parse_state(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw afpp::DomainError("expected x,y but got '" + s + "'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw afpp::DomainError("expected x,y but got '" + s + "'");
  }
}

std::pair<double, double> parse_range(const std::string& s) {
  const afpp::State r = parse_state(s);
  return {r.x, r.y};
}

// equilibria

struct EquilibriaArgs {
  std::size_t nullcline_points = 0;
};

int cmd_equilibria(const Config& c, const EquilibriaArgs& a) {
  const auto& p = c.params;
  Rows rows;
  for (const auto& e : afpp::find_all_equilibria(p, c.classify())) {
    std::vector<std::string> r = {std::string(afpp::to_string(e.kind)), fmt(e.location.x), fmt(e.location.y)};
    for (auto& v : eigen_cells(e.eigenvalues)) r.push_back(v);
    r.push_back(std::string(afpp::to_string(e.stability)));
    r.push_back(fmt(e.flags.phi1));
    r.push_back(fmt(e.flags.phi2));
    r.push_back(fmt(e.flags.phi3));
    const bool interior = e.kind == afpp::EquilibriumKind::Interior;
    r.push_back(interior ? (e.flags.x_squared_below_load ? "1" : "0") : "");
    r.push_back(interior ? (e.flags.above_floor ? "1" : "0") : "");
    r.push_back(interior ? (e.flags.sufficient_stability ? "1" : "0") : "");
    rows.push_back(std::move(r));
  }
  afpp::io::write_csv(c.path("equilibria.csv"), c.meta("equilibria"),
                      {"kind", "x", "y", "re1", "im1", "re2", "im2", "class", "phi1", "phi2", "phi3",
                       "x2_below_load", "above_floor", "sufficient_stability"},
                      rows);

  if (a.nullcline_points > 1) {
    Rows nc;
    const double hi = 1.2 * p.gamma;
    for (std::size_t i = 1; i <= a.nullcline_points; ++i) {
      const double x = hi * static_cast<double>(i) / static_cast<double>(a.nullcline_points);
      nc.push_back({fmt(x), fmt(afpp::prey_nullcline_y(p, x)), fmt(afpp::predator_nullcline_y(p, x))});
    }
    json meta = c.meta("equilibria");
    meta["discriminant"] = afpp::nullcline_discriminant(p);
    afpp::io::write_csv(c.path("nullclines.csv"), meta, {"x", "prey_y", "predator_y"}, nc);
  }
  return 0;
}

// simulate

struct SimulateArgs {
  std::vector<std::string> initial;
  double t_end = 200.0;
  std::size_t samples = 0;
};

int cmd_simulate(const Config& c, const SimulateArgs& a) {
  std::vector<afpp::State> starts;
  for (const auto& s : a.initial) starts.push_back(parse_state(s));
  if (starts.empty()) starts.push_back({0.5 * c.params.gamma, 1.0});
  if (!(a.t_end > 0.0)) throw afpp::DomainError("--t-end must be positive");

  Rows rows;
  json runs = json::array();
  bool truncated = false;
  std::string failure;
  for (std::size_t k = 0; k < starts.size() && !truncated; ++k) {
    afpp::Trajectory tr;
    try {
      tr = afpp::integrate(c.params, starts[k], a.t_end, c.simulation());
    } catch (const afpp::IntegrationError& e) {
      tr = e.partial();
      truncated = true;
      failure = e.what();
    }
    truncated = truncated || tr.truncated;
    if (a.samples > 1 && !tr.empty()) {
      const double t0 = tr.times.front(), t1 = tr.times.back();
      const auto pts = tr.sample(t0, t1, a.samples);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(a.samples - 1);
        rows.push_back({std::to_string(k), fmt(t), fmt(pts[i].x), fmt(pts[i].y)});
      }
    } else {
      for (std::size_t i = 0; i < tr.size(); ++i) {
        rows.push_back({std::to_string(k), fmt(tr.times[i]), fmt(tr.states[i].x), fmt(tr.states[i].y)});
      }
    }
    // Oscillation amplitude of x over the second half.
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    if (!tr.empty()) {
      const double mid = 0.5 * (tr.times.front() + tr.times.back());
      for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr.times[i] < mid) continue;
        lo = std::min(lo, tr.states[i].x);
        hi = std::max(hi, tr.states[i].x);
      }
    }
    json events = json::array();
    for (const auto& e : tr.events) {
      events.push_back({{"t", e.t}, {"kind", std::string(afpp::to_string(e.kind))}, {"detail", e.detail}});
    }
    runs.push_back({{"initial", {starts[k].x, starts[k].y}},
                    {"final", tr.empty() ? json() : json{tr.states.back().x, tr.states.back().y}},
                    {"t_reached", tr.empty() ? 0.0 : tr.times.back()},
                    {"accepted_steps", tr.size()},
                    {"rejected_steps", tr.rejected_steps},
                    {"amplitude_x_second_half", hi >= lo ? hi - lo : 0.0},
                    {"events", events}});
  }
  afpp::io::write_csv(c.path("trajectory.csv"), c.meta("simulate", truncated), {"run", "t", "x", "y"}, rows);
  json body = {{"runs", runs}};
  if (!failure.empty()) body["failure"] = failure;
  afpp::io::write_json(c.path("simulate_summary.json"), c.meta("simulate", truncated), body);
  if (!failure.empty()) {
    std::cerr << "afpp: " << failure << '\n';
    return 3;
  }
  return truncated ? 3 : 0;
}

// bifurcate

struct BifurcateArgs {
  std::string param = "xi";
  std::string range;
  double max_step = 0.05;
  std::size_t axial_samples = 0;
  std::size_t fold_scan = 4000;
};

json event_json(const afpp::BifurcationEvent& e) {
  json j = {{"kind", std::string(afpp::to_string(e.kind))},
            {"branch", e.branch_id},
            {"value", e.param_value},
            {"bracket", {e.bracket_lo, e.bracket_hi}},
            {"location", {e.location.x, e.location.y}},
            {"note", e.note}};
  if (e.sotomayor) {
    j["sotomayor"] = {{"w_h_mu", e.sotomayor->w_h_mu},
                      {"w_dh_mu_v", e.sotomayor->w_dh_mu_v},
                      {"w_d2h_vv", e.sotomayor->w_d2h_vv}};
  }
  return j;
}

json critical_json(const afpp::CriticalXi& c) {
  return {{"xi_star", c.xi_star},
          {"bracket", {c.bracket_lo, c.bracket_hi}},
          {"location", {c.location.x, c.location.y}},
          {"eigenvalues", {{c.eigenvalues[0].real(), c.eigenvalues[0].imag()},
                           {c.eigenvalues[1].real(), c.eigenvalues[1].imag()}}},
          {"sotomayor",
           {{"w_h_mu", c.sotomayor.w_h_mu},
            {"w_dh_mu_v", c.sotomayor.w_dh_mu_v},
            {"w_d2h_vv", c.sotomayor.w_d2h_vv},
            {"saddle_node_conditions", c.sotomayor.saddle_node_conditions},
            {"transcritical_conditions", c.sotomayor.transcritical_conditions}}}};
}

int cmd_bifurcate(const Config& c, const BifurcateArgs& a) {
  const afpp::Param param = afpp::param_from_string(a.param);
  const auto range = parse_range(a.range);
  if (!(range.second > range.first)) throw afpp::DomainError("--range needs lo < hi");

  afpp::ContinuationOptions opts;
  opts.max_step = a.max_step;
  opts.newton_tol = c.tol_newton;
  opts.event_tol = c.tol_event;
  opts.classify = c.classify();
  const auto branches = afpp::continue_all_branches(c.params, param, range, opts);

  Rows rows, events;
  bool truncated = false;
  json notices = json::array();
  std::size_t folds = 0, hopfs = 0;
  for (const auto& b : branches) {
    truncated = truncated || b.truncated;
    if (!b.notice.empty()) notices.push_back(b.notice);
    for (const auto& pt : b.points) {
      std::vector<std::string> r = {std::to_string(pt.branch_id), fmt(pt.param_value),
                                    fmt(pt.equilibrium.location.x), fmt(pt.equilibrium.location.y)};
      for (auto& v : eigen_cells(pt.equilibrium.eigenvalues)) r.push_back(v);
      r.push_back(std::string(afpp::to_string(pt.equilibrium.stability)));
      rows.push_back(std::move(r));
    }
    for (const auto& e : b.events) {
      folds += e.kind == afpp::BifurcationKind::Fold;
      hopfs += e.kind == afpp::BifurcationKind::Hopf;
      events.push_back({std::string(afpp::to_string(e.kind)), std::to_string(e.branch_id), fmt(e.param_value),
                        fmt(e.bracket_lo), fmt(e.bracket_hi), fmt(e.location.x), fmt(e.location.y), e.note});
    }
  }
  const json meta = c.meta("bifurcate", truncated);
  afpp::io::write_csv(c.path("branches.csv"), meta,
                      {"branch", a.param, "x", "y", "re1", "im1", "re2", "im2", "class"}, rows);
  afpp::io::write_csv(c.path("events.csv"), meta,
                      {"kind", "branch", a.param, "bracket_lo", "bracket_hi", "x", "y", "note"}, events);

  if (a.axial_samples > 1) {
    Rows ax;
    for (std::size_t i = 0; i < a.axial_samples; ++i) {
      const double v = range.first + (range.second - range.first) * static_cast<double>(i) /
                                         static_cast<double>(a.axial_samples - 1);
      for (const auto& e : afpp::find_all_equilibria(afpp::with(c.params, param, v), c.classify())) {
        if (e.kind == afpp::EquilibriumKind::Interior) continue;
        std::vector<std::string> r = {fmt(v), std::string(afpp::to_string(e.kind)), fmt(e.location.x),
                                      fmt(e.location.y)};
        for (auto& s : eigen_cells(e.eigenvalues)) r.push_back(s);
        r.push_back(std::string(afpp::to_string(e.stability)));
        ax.push_back(std::move(r));
      }
    }
    afpp::io::write_csv(c.path("axial.csv"), meta,
                        {a.param, "kind", "x", "y", "re1", "im1", "re2", "im2", "class"}, ax);
  }

  json crit = {{"branches", branches.size()}, {"folds", folds}, {"hopf", hopfs}, {"notices", notices}};
  json evs = json::array();
  for (const auto& b : branches) {
    for (const auto& e : b.events) evs.push_back(event_json(e));
  }
  crit["events"] = evs;
  if (param == afpp::Param::Xi) {
    try {
      crit["transcritical"] = critical_json(afpp::transcritical_xi_critical(c.params, c.tol_event));
    } catch (const afpp::DomainError& e) {
      crit["transcritical"] = {{"unavailable", e.what()}};
    }
    try {
      crit["saddle_node"] = critical_json(afpp::saddlenode_xi_critical(c.params, c.tol_event));
    } catch (const afpp::DomainError& e) {
      crit["saddle_node"] = {{"unavailable", e.what()}};
    }
  }
  if (a.fold_scan > 1) {
    json oracle = json::array();
    for (const auto& f : afpp::checks::resultant_folds(c.params, param, range.first, range.second, a.fold_scan)) {
      oracle.push_back({{"value", f.value}, {"x", f.x}});
    }
    crit["resultant_folds"] = oracle;
  }
  afpp::io::write_json(c.path("critical.json"), meta, crit);
  if (truncated) {
    std::cerr << "afpp: continuation truncated\n";
    return 3;
  }
  return 0;
}

// hysteresis

struct HysteresisArgs {
  double eps_min = 0.002;
  double eps_max = 0.02;
  double period = 50000.0;
  int cycles = 2;
  std::string initial;
  std::size_t rows = 4000;
  std::size_t samples_per_cycle = 200000;
};

int cmd_hysteresis(const Config& c, const HysteresisArgs& a) {
  const afpp::State x0 = a.initial.empty() ? afpp::State{c.params.gamma, 0.5} : parse_state(a.initial);
  afpp::SweepResult r;
  bool truncated = false;
  std::string failure;
  try {
    r = afpp::hysteresis_sweep(c.params, a.eps_min, a.eps_max, a.period, a.cycles, x0, c.simulation(),
                               a.samples_per_cycle);
  } catch (const afpp::IntegrationError& e) {
    r.trajectory = e.partial();
    truncated = true;
    failure = e.what();
  }
  truncated = truncated || r.trajectory.truncated;
  const json meta = c.meta("hysteresis", truncated);

  Rows rows;
  const auto& tr = r.trajectory;
  if (!tr.empty() && a.rows > 1) {
    const double mid = 0.5 * (a.eps_min + a.eps_max);
    const double half = 0.5 * (a.eps_max - a.eps_min);
    const double t1 = tr.times.back();
    for (std::size_t i = 0; i < a.rows; ++i) {
      const double t = t1 * static_cast<double>(i) / static_cast<double>(a.rows - 1);
      const afpp::State s = tr.at(t);
      const double eps = mid + half * std::sin(2.0 * std::numbers::pi * t / a.period);
      rows.push_back({fmt(t), fmt(eps), fmt(s.x), fmt(s.y)});
    }
  }
  afpp::io::write_csv(c.path("sweep.csv"), meta, {"t", "eps", "x", "y"}, rows);

  json jumps = json::array();
  for (const auto& j : r.jumps) jumps.push_back({{"t", j.t}, {"eps", j.eps}, {"upward", j.upward}});
  json body = {{"eps_range", {a.eps_min, a.eps_max}},
               {"period", a.period},
               {"cycles", a.cycles},
               {"loop_area_proxy", r.loop_area_proxy},
               {"jump_threshold", r.jump_threshold},
               {"jumps", jumps}};
  if (!failure.empty()) body["failure"] = failure;
  afpp::io::write_json(c.path("hysteresis.json"), meta, body);
  if (truncated) {
    std::cerr << "afpp: " << (failure.empty() ? "sweep truncated" : failure) << '\n';
    return 3;
  }
  return 0;
}

// atlas

struct AtlasArgs {
  std::string alpha_range = "0.01,100";
  std::string xi_range = "0.01,100";
  std::size_t n_alpha = 200;
  std::size_t n_xi = 200;
  unsigned threads = 0;
};

int cmd_atlas(const Config& c, const AtlasArgs& a) {
  const auto ar = parse_range(a.alpha_range);
  const auto xr = parse_range(a.xi_range);
  const auto at = afpp::atlas(c.params, afpp::log_grid(ar.first, ar.second, a.n_alpha),
                              afpp::log_grid(xr.first, xr.second, a.n_xi), a.threads, c.classify());
  const auto rep = afpp::consequences_report(at);

  Rows rows;
  rows.reserve(at.cells.size());
  for (std::size_t i = 0; i < at.cells.size(); ++i) {
    const auto& cell = at.cells[i];
    const auto& cq = rep.cells[i];
    const auto& f = cell.flags;
    rows.push_back({fmt(cell.alpha), fmt(cell.xi), fmt(cell.phi.phi1), fmt(cell.phi.phi2), fmt(cell.phi.phi3),
                    cell.subregion, std::string(afpp::to_string(f.e0)), std::string(afpp::to_string(f.e1)),
                    f.e2 ? std::string(afpp::to_string(*f.e2)) : "", std::to_string(f.interior_count),
                    std::to_string(f.stable_interior_count), f.bistable ? "1" : "0", fmt(f.min_stable_x),
                    cq.stable_e2 ? "1" : "0", cq.dominance_risk ? "1" : "0", cq.floor_respected ? "1" : "0",
                    cq.eradication_verdict, f.error});
  }
  json meta = c.meta("atlas");
  meta["base_region"] = std::string(afpp::to_string(at.base_region));
  meta["subregion_mapping"] = afpp::subregion_mapping();
  afpp::io::write_csv(c.path("atlas.csv"), meta,
                      {"alpha", "xi", "phi1", "phi2", "phi3", "subregion", "e0", "e1", "e2", "interior_count",
                       "stable_interior_count", "bistable", "min_stable_x", "stable_e2", "dominance_risk",
                       "floor_respected", "eradication_verdict", "error"},
                      rows);
  afpp::io::write_json(c.path("atlas_summary.json"), meta,
                       {{"cells", at.cells.size()},
                        {"base_region", std::string(afpp::to_string(at.base_region))},
                        {"floor", rep.floor},
                        {"stable_e2_cells", rep.stable_e2_cells},
                        {"dominance_cells", rep.dominance_cells},
                        {"floor_violations", rep.floor_violations}});
  return 0;
}

// control

struct ControlArgs {
  std::string problem;
  std::optional<double> calibrate_to;
  double calibrate_tol = 0.1;
  std::optional<int> mesh;
  std::size_t resim_rows = 2000;
};

int cmd_control(Config& c, const ControlArgs& a) {
  afpp::control::ControlProblem prob = afpp::io::control_problem_from_json(afpp::io::read_json_file(a.problem));
  if (a.mesh) prob.mesh_size = *a.mesh;
  prob.nlp.kkt_tol = c.tol_kkt;
  prob.validate();
  c.params = prob.params;
  c.params_json = afpp::io::to_json(prob.params);

  json body = {{"problem", afpp::io::to_json(prob)}};
  std::optional<afpp::control::ControlSolution> sol;
  try {
    if (a.calibrate_to) {
      auto cal = afpp::control::calibrate_bounds(prob, *a.calibrate_to, a.calibrate_tol);
      json attempts = json::array();
      for (const auto& t : cal.attempts) {
        attempts.push_back({{"bounds", {t.u_min, t.u_max}},
                            {"feasible", t.feasible},
                            {"T_opt", t.T_opt},
                            {"note", t.note}});
      }
      body["calibration"] = {{"target_T", *a.calibrate_to},
                             {"rel_tol", a.calibrate_tol},
                             {"matched", cal.matched},
                             {"chosen_bounds", {cal.problem.u_min, cal.problem.u_max}},
                             {"attempts", attempts}};
      prob = cal.problem;
      body["problem"] = afpp::io::to_json(prob);
      if (!cal.solution) throw afpp::InfeasibleError("no candidate bounds gave a feasible solution", HUGE_VAL);
      sol = std::move(cal.solution);
    } else {
      sol = afpp::control::solve(prob);
    }
  } catch (const afpp::InfeasibleError& e) {
    body["infeasible"] = {{"message", e.what()}, {"best_residual", e.best_residual()}};
    const auto reach = afpp::control::reachability(prob);
    body["reachability"] = {{"prey_ceiling", reach.prey_ceiling},
                            {"predator_ceiling", reach.predator_ceiling},
                            {"excess", reach.excess},
                            {"reachable", reach.reachable}};
    afpp::io::write_json(c.path("control_summary.json"), c.meta("control"), body);
    std::cerr << "afpp: infeasible: " << e.what() << '\n';
    return 4;
  }

  const auto& s = *sol;
  body.update(afpp::io::summary_json(s));

  Rows rows;
  const std::size_t n = s.states.size();
  for (std::size_t k = 0; k < n; ++k) {
    const bool has_u = k + 1 < n;
    rows.push_back({fmt(s.s_grid[k]), fmt(s.t_grid[k]), fmt(s.states[k].x), fmt(s.states[k].y),
                    has_u ? fmt(s.controls[k]) : "", has_u && k < s.sigma.size() ? fmt(s.sigma[k]) : ""});
  }
  const json meta = c.meta("control");
  afpp::io::write_csv(c.path("control.csv"), meta, {"s", "t", "x", "y", "u", "sigma"}, rows);

  if (n > 1) {
    const auto pmp = afpp::control::verify_pmp(s, prob);
    json pj = {{"costate_source", pmp.costate_source},
               {"checked", pmp.checked},
               {"consistent", pmp.consistent},
               {"excluded", pmp.excluded},
               {"fraction", pmp.fraction},
               {"sigma_tol", pmp.sigma_tol},
               {"min_costate_norm", pmp.min_costate_norm},
               {"singular_candidates", pmp.singular_candidates},
               {"switches_bracketed", pmp.switches_bracketed},
               {"bang_fraction", pmp.bang_fraction}};
    if (pmp.warning) pj["warning"] = *pmp.warning;
    body["pmp"] = pj;

    const auto rs = afpp::control::resimulate_physical(s, prob);
    body["resimulation"] = {{"final_state", {rs.final_state.x, rs.final_state.y}},
                            {"target_error", rs.target_error}};
    Rows rr;
    if (!rs.times.empty() && a.resim_rows > 1) {
      for (std::size_t i = 0; i < rs.times.size(); ++i) {
        rr.push_back({fmt(rs.times[i]), fmt(rs.states[i].x), fmt(rs.states[i].y)});
      }
      if (rr.size() > a.resim_rows) {
        Rows thin;
        const std::size_t stride = (rr.size() + a.resim_rows - 1) / a.resim_rows;
        for (std::size_t i = 0; i < rr.size(); i += stride) thin.push_back(rr[i]);
        if ((rr.size() - 1) % stride != 0) thin.push_back(rr.back());
        rr = std::move(thin);
      }
    }
    afpp::io::write_csv(c.path("resimulation.csv"), meta, {"t", "x", "y"}, rr);
  }
  afpp::io::write_json(c.path("control_summary.json"), c.meta("control"), body);
  return 0;
}

// verify

int cmd_verify(const Config& c) {
  const auto suites = afpp::checks::run_all(c.seed);
  json list = json::array();
  bool ok = true;
  for (const auto& s : suites) {
    ok = ok && s.passed();
    list.push_back({{"name", s.name},
                    {"passed", s.passed()},
                    {"samples", s.samples},
                    {"failures", s.failures},
                    {"worst", s.worst},
                    {"tolerance", s.tolerance},
                    {"seconds", s.seconds},
                    {"worst_case", s.worst_case}});
    std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << " worst=" << s.worst << " failures=" << s.failures
              << '/' << s.samples << '\n';
  }
  afpp::io::write_json(c.path("verify.json"), c.meta("verify"), {{"passed", ok}, {"suites", list}});
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additional-food predator-prey toolkit"};
  app.require_subcommand(1);
  Config cfg;

  EquilibriaArgs eq;
  auto* s_eq = app.add_subcommand("equilibria", "Equilibria, eigenvalues and closed-form flags");
  add_common(s_eq, cfg);
  s_eq->add_option("--nullclines", eq.nullcline_points, "Also write n nullcline samples on (0, 1.2 gamma]");

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Integrate trajectories");
  add_common(s_sim, cfg);
  s_sim->add_option("--initial", sim.initial, "Initial state x,y (repeatable)");
  s_sim->add_option("--t-end", sim.t_end, "Final time")->capture_default_str();
  s_sim->add_option("--samples", sim.samples, "Uniform dense-output samples per run (0: accepted steps)");

  BifurcateArgs bif;
  auto* s_bif = app.add_subcommand("bifurcate", "Continue interior branches in one parameter");
  add_common(s_bif, cfg);
  s_bif->add_option("--param", bif.param, "Continuation parameter")->capture_default_str();
  s_bif->add_option("--range", bif.range, "lo,hi")->required();
  s_bif->add_option("--max-step", bif.max_step, "Maximum arclength step")->capture_default_str();
  s_bif->add_option("--axial-samples", bif.axial_samples, "Also tabulate E0/E1/E2 at n parameter values");
  s_bif->add_option("--fold-scan", bif.fold_scan, "Resultant oracle scan points (0 disables)")
      ->capture_default_str();

  HysteresisArgs hys;
  auto* s_hys = app.add_subcommand("hysteresis", "Slow sinusoidal sweep of epsilon");
  add_common(s_hys, cfg);
  s_hys->add_option("--eps-min", hys.eps_min)->capture_default_str();
  s_hys->add_option("--eps-max", hys.eps_max)->capture_default_str();
  s_hys->add_option("--period", hys.period)->capture_default_str();
  s_hys->add_option("--cycles", hys.cycles)->capture_default_str();
  s_hys->add_option("--initial", hys.initial, "Initial state x,y (default gamma,0.5)");
  s_hys->add_option("--rows", hys.rows, "Uniform rows in sweep.csv")->capture_default_str();
  s_hys->add_option("--samples-per-cycle", hys.samples_per_cycle)->capture_default_str();

  AtlasArgs atl;
  auto* s_atl = app.add_subcommand("atlas", "Region atlas over log-spaced (alpha, xi)");
  add_common(s_atl, cfg);
  s_atl->add_option("--alpha-range", atl.alpha_range, "lo,hi")->capture_default_str();
  s_atl->add_option("--xi-range", atl.xi_range, "lo,hi")->capture_default_str();
  s_atl->add_option("--n-alpha", atl.n_alpha)->capture_default_str();
  s_atl->add_option("--n-xi", atl.n_xi)->capture_default_str();
  s_atl->add_option("--threads", atl.threads, "0: hardware concurrency");

  ControlArgs ctl;
  auto* s_ctl = app.add_subcommand("control", "Minimum-time control by direct multiple shooting");
  add_common(s_ctl, cfg);
  s_ctl->add_option("--problem", ctl.problem, "Control problem JSON")->required();
  s_ctl->add_option("--calibrate-to", ctl.calibrate_to, "Search bounds until T_opt matches this value");
  s_ctl->add_option("--calibrate-tol", ctl.calibrate_tol)->capture_default_str();
  s_ctl->add_option("--mesh", ctl.mesh, "Override mesh_size");
  s_ctl->add_option("--resim-rows", ctl.resim_rows)->capture_default_str();

  auto* s_ver = app.add_subcommand("verify", "Randomized invariant suites");
  add_common(s_ver, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    prepare_out(cfg);
    if (s_ctl->parsed()) return cmd_control(cfg, ctl);
    resolve_params(cfg);
    if (s_eq->parsed()) return cmd_equilibria(cfg, eq);
    if (s_sim->parsed()) return cmd_simulate(cfg, sim);
    if (s_bif->parsed()) return cmd_bifurcate(cfg, bif);
    if (s_hys->parsed()) return cmd_hysteresis(cfg, hys);
    if (s_atl->parsed()) return cmd_atlas(cfg, atl);
    if (s_ver->parsed()) return cmd_verify(cfg);
  } catch (const afpp::DomainError& e) {
    std::cerr << "afpp: " << e.what() << '\n';
    return 2;
  } catch (const afpp::InfeasibleError& e) {
    std::cerr << "afpp: infeasible: " << e.what() << '\n';
    return 4;
  } catch (const afpp::Error& e) {
    std::cerr << "afpp: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "afpp: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
