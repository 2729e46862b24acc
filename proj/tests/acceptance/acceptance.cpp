#include "afpp/bifurcation.hpp"
#include "afpp/checks.hpp"
#include "afpp/equilibria.hpp"
#include "afpp/global_dynamics.hpp"
#include "afpp/optimal_control.hpp"
#include "afpp/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace afpp;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int report(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  o.detail.precision(10);
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  o.require(s < limit_s, "runtime");
  std::printf("%s criterion %d: %s (%.2fs)%s\n", o.pass ? "PASS" : "FAIL", id, title, s, o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

double x_amplitude(const Trajectory& tr, double from, double to) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto& s : tr.sample(from, to, 20000)) {
    lo = std::min(lo, s.x);
    hi = std::max(hi, s.x);
  }
  return hi - lo;
}

std::vector<BifurcationEvent> events_of(const std::vector<ContinuationResult>& bs, BifurcationKind k) {
  std::vector<BifurcationEvent> out;
  for (const auto& b : bs) {
    for (const auto& e : b.events) {
      if (e.kind == k) out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.param_value < b.param_value; });
  return out;
}

// Stable interior branch points below eps/(1+eps/gamma) - 1e-9.
std::size_t floor_breaches(const ModelParams& p, const std::vector<ContinuationResult>& bs, std::size_t& stable) {
  std::size_t bad = 0;
  for (const auto& b : bs) {
    for (const auto& pt : b.points) {
      if (!is_stable(pt.equilibrium.stability)) continue;
      ++stable;
      const ModelParams q = with(p, Param::Epsilon, pt.param_value);
      bad += !(pt.equilibrium.location.x > prey_floor(q) - 1e-9);
    }
  }
  return bad;
}

const ModelParams kTc{1.0, 1.0, 2.0, 0.5, 6.0, 8.0};
const ModelParams kHopf{15.0, 0.1, 0.45, 0.04, 0.28, 0.45};
const ModelParams kScurve{15.0, 0.1, 1.0, 0.01, 0.258, 0.3};

}  // namespace

int main() {
  int failed = 0;

  failed += report(1, "transcritical at xi = 2", 1.0, [](Outcome& o) {
    const auto c = transcritical_xi_critical(kTc);
    o.detail << " xi*=" << c.xi_star << " bracket=[" << c.bracket_lo << ", " << c.bracket_hi << "]";
    o.require(c.xi_star == 2.0, "xi* == 2.0");
    o.require(c.bracket_lo >= 2.0 - 1e-8 && c.bracket_hi <= 2.0 + 1e-8 && c.bracket_lo <= c.bracket_hi,
              "bracket within 2 +- 1e-8");
    // The second eigenvalue of J(E1) changes sign across the bracket.
    auto lam = [](double xi) { return jacobian(with(kTc, Param::Xi, xi), {kTc.gamma, 0.0})(1, 1); };
    o.require(lam(c.bracket_lo - 1e-9) * lam(c.bracket_hi + 1e-9) < 0.0, "sign change across bracket");
  });

  failed += report(2, "saddle-node at xi = 3", 1.0, [](Outcome& o) {
    const auto c = saddlenode_xi_critical(kTc);
    o.detail << " xi*=" << c.xi_star;
    o.require(c.xi_star == 3.0, "xi* == 3.0");
    const ModelParams above = with(kTc, Param::Xi, 3.0 + 1e-3);
    const auto e2 = prey_free_equilibrium(above);
    const auto interior = find_interior_equilibria(above);
    o.require(e2.has_value(), "E2 exists above 3");
    o.require(!interior.empty(), "interior equilibrium exists above 3");
    if (e2 && !interior.empty()) {
      double d = HUGE_VAL;
      for (const auto& e : interior) d = std::min(d, std::hypot(e.location.x - e2->x, e.location.y - e2->y));
      o.detail << " |E*-E2|=" << d;
    }
    for (double xi : {2.0, 2.9, 2.999, 3.0 - 1e-9}) {
      o.require(!prey_free_equilibrium(with(kTc, Param::Xi, xi)), "E2 absent below 3");
    }
  });

  failed += report(3, "Hopf window in eps", 30.0, [](Outcome& o) {
    const auto hopf = detect_hopf(kHopf, Param::Epsilon, {0.035, 0.045});
    o.detail << " sign changes=" << hopf.size();
    o.require(hopf.size() == 1, "exactly one Re(lambda) sign change in [0.035, 0.045]");
    auto run = [](double eps) {
      const ModelParams p = with(kHopf, Param::Epsilon, eps);
      const auto es = find_interior_equilibria(p);
      const State e = es.empty() ? State{3.0, 3.0} : es.front().location;
      const auto tr = integrate(p, {e.x + 0.05, e.y}, 2000.0);
      return x_amplitude(tr, 1000.0, 2000.0);
    };
    const double a35 = run(0.035);
    const double a45 = run(0.045);
    o.detail << " amp(0.035)=" << a35 << " amp(0.045)=" << a45;
    o.require(a35 > 0.1, "oscillation sustained at 0.035");
    o.require(a45 < 1e-3, "oscillation decays at 0.045");
  });

  failed += report(4, "S-curve and hysteresis", 120.0, [](Outcome& o) {
    const auto bs = continue_all_branches(kScurve, Param::Epsilon, {0.002, 0.02});
    const auto folds = events_of(bs, BifurcationKind::Fold);
    const auto oracle = checks::resultant_folds(kScurve, Param::Epsilon, 0.002, 0.02);
    o.detail << " folds=" << folds.size() << " oracle=" << oracle.size();
    o.require(folds.size() == 2, "exactly 2 folds");
    o.require(oracle.size() == 2, "oracle finds 2 double roots");
    if (folds.size() != 2 || oracle.size() != 2) return;
    double dev = 0.0;
    for (int i = 0; i < 2; ++i) dev = std::max(dev, std::abs(folds[i].param_value - oracle[i].value));
    o.detail << " fold eps=" << folds[0].param_value << "," << folds[1].param_value << " max|dev|=" << dev;
    o.require(dev <= 1e-6, "folds within 1e-6 of oracle");
    const double mid = 0.5 * (folds[0].param_value + folds[1].param_value);
    o.require(find_interior_equilibria(with(kScurve, Param::Epsilon, mid)).size() == 3, "3-equilibrium window");

    const auto sweep = hysteresis_sweep(kScurve, 0.002, 0.02, 50000.0, 2, {kScurve.gamma, 0.5});
    o.detail << " area=" << sweep.loop_area_proxy << " jumps=" << sweep.jumps.size();
    o.require(sweep.loop_area_proxy > 0.0, "positive loop area");
    o.require(sweep.jumps.size() == 2, "one up and one down jump");
    for (const auto& j : sweep.jumps) {
      const double fold = j.upward ? folds[1].param_value : folds[0].param_value;
      const double rel = std::abs(j.eps - fold) / fold;
      o.detail << (j.upward ? " up@" : " down@") << j.eps << " (" << 100.0 * rel << "%)";
      o.require(rel <= 0.05, "jump within 5% of fold");
    }
  });

  failed += report(5, "optimal control times", 600.0, [](Outcome& o) {
    using namespace control;
    auto scenario = [&](const char* name, ControlProblem prob, double target_T) {
      const auto t0 = Clock::now();
      const auto cal = calibrate_bounds(prob, target_T, 0.1);
      o.detail << " " << name << ":";
      if (!cal.solution) {
        const auto r = reachability(prob);
        o.detail << " infeasible for every candidate (predator ceiling " << r.predator_ceiling << " vs target "
                 << prob.target.y << ")";
        o.require(false, std::string(name) + " T_opt within 10%");
        return;
      }
      const auto& sol = *cal.solution;
      ControlProblem fine = cal.problem;
      fine.mesh_size *= 2;
      const double T2 = solve(fine).T_opt;
      const double pmp = verify_pmp(sol, cal.problem).fraction;
      const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      o.detail << " bounds=[" << cal.problem.u_min << "," << cal.problem.u_max << "] T=" << sol.T_opt
               << " T(2N)=" << T2 << " pmp=" << pmp << " t=" << secs << "s";
      o.require(std::abs(sol.T_opt - target_T) <= 0.1 * target_T, std::string(name) + " T_opt within 10%");
      o.require(std::abs(T2 - sol.T_opt) / sol.T_opt < 0.01, std::string(name) + " mesh doubling < 1%");
      o.require(pmp >= 0.95, std::string(name) + " PMP fraction");
      o.require(secs < 300.0, std::string(name) + " under 5 min");
    };

    ControlProblem q;
    q.params = {7.0, 1.0, 0.1, 0.3, 1.0, 3.0};
    q.control = ControlKind::Quality;
    std::tie(q.u_min, q.u_max) = default_bounds(q.control);
    q.initial = {5.0, 2.0};
    q.target = {1.0, 4.0};
    scenario("quality", q, 2.1);

    ControlProblem x;
    x.params = {4.0, 1.0, 0.5, 0.5, 1.0, 2.0};
    x.control = ControlKind::Quantity;
    std::tie(x.u_min, x.u_max) = default_bounds(x.control);
    x.initial = {5.0, 2.0};
    x.target = {1.0, 4.0};
    scenario("quantity", x, 5.05);
  });

  failed += report(6, "property suites", 120.0, [](Outcome& o) {
    for (const auto& s : checks::run_all(42)) {
      o.detail << " " << s.name << "=" << s.failures << "/" << s.samples << "(worst " << s.worst << ")";
      o.require(s.passed(), s.name);
    }
  });

  failed += report(7, "consequences", 600.0, [](Outcome& o) {
    const ModelParams bases[] = {{1.0, 1.0, 0.0, 0.5, 6.0, 8.0},
                                 {1.0, 0.1, 0.0, 0.03, 0.1, 0.6},
                                 {15.0, 0.1, 0.0, 0.01, 0.258, 0.3}};
    const auto grid = log_grid(1e-2, 1e2, 200);
    std::size_t stable_e2 = 0, cells = 0;
    for (const auto& b : bases) {
      const auto rep = consequences_report(atlas(b, grid, grid));
      stable_e2 += rep.stable_e2_cells;
      cells += rep.cells.size();
    }
    o.detail << " atlas cells=" << cells << " stable E2=" << stable_e2;
    o.require(stable_e2 == 0, "no stable E2 in any atlas cell");

    std::size_t stable = 0;
    std::size_t bad = floor_breaches(kHopf, continue_all_branches(kHopf, Param::Epsilon, {0.035, 0.045}), stable);
    bad += floor_breaches(kScurve, continue_all_branches(kScurve, Param::Epsilon, {0.002, 0.02}), stable);
    o.detail << " stable branch points=" << stable << " below floor=" << bad;
    o.require(stable > 0, "stable equilibria examined");
    o.require(bad == 0, "floor respected in the Hopf and S-curve cases");
  });

  std::printf("%d of 7 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
