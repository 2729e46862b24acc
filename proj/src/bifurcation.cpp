#include "afpp/bifurcation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace afpp {
namespace {

using Vec3 = Eigen::Vector3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;

struct Bracket {
  double lo;
  double hi;
};

// Bisection on a scalar function with a sign change over [lo, hi].
Bracket bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, lo};
  if (fhi == 0.0) return {hi, hi};
  if (std::signbit(flo) == std::signbit(fhi)) throw NumericalError("no sign change to bracket");
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, mid};
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

// Interior equilibria solve G = 0: the prey equation divided by x and the
// predator equation divided by y.
Eigen::Vector2d G(const ModelParams& p, double x, double y) {
  const double D = p.food_load() + x * x;
  return {1.0 - x / p.gamma - x * y / D, p.delta * (x * x + p.xi) / D - p.m - p.epsilon * y};
}

Eigen::Vector2d dG_dparam(const ModelParams& p, Param param, double x, double y) {
  const double L = p.food_load();
  const double D = L + x * x;
  const double D2 = D * D;
  switch (param) {
    case Param::Gamma: return {x / (p.gamma * p.gamma), 0.0};
    case Param::Alpha: return {x * y * p.xi / D2, -p.delta * (x * x + p.xi) * p.xi / D2};
    case Param::Xi:
      return {x * y * p.alpha / D2, p.delta * (1.0 + x * x * (1.0 - p.alpha)) / D2};
    case Param::Epsilon: return {0.0, -y};
    case Param::M: return {0.0, -1.0};
    case Param::Delta: return {0.0, (x * x + p.xi) / D};
  }
  return {0.0, 0.0};
}

Eigen::Matrix2d dG_dstate(const ModelParams& p, double x, double y) {
  const double L = p.food_load();
  const double D = L + x * x;
  Eigen::Matrix2d J;
  J << -1.0 / p.gamma - y * (L - x * x) / (D * D), -x / D,
      2.0 * p.delta * x * (L - p.xi) / (D * D), -p.epsilon;
  return J;
}

struct Ctx {
  ModelParams base;
  Param param;
  double mu0;
  double width;
  double newton_tol;

  double mu(double s) const { return mu0 + width * s; }
  ModelParams at(double s) const { return with(base, param, mu(s)); }

  Mat23 jac(const Vec3& u) const {
    const auto p = at(u[2]);
    Mat23 M;
    M.leftCols<2>() = dG_dstate(p, u[0], u[1]);
    M.col(2) = width * dG_dparam(p, param, u[0], u[1]);
    return M;
  }

  Vec3 tangent(const Vec3& u, const Vec3& orient) const {
    const Mat23 M = jac(u);
    Vec3 t = Vec3(M.row(0)).cross(Vec3(M.row(1)));
    const double n = t.norm();
    if (n == 0.0) return orient;
    t /= n;
    return t.dot(orient) < 0.0 ? -t : t;
  }

  // Newton on G = 0 with the arclength constraint t.(u - u_pred) = 0.
  std::optional<Vec3> correct(const Vec3& pred, const Vec3& t, int* iters = nullptr) const {
    Vec3 u = pred;
    for (int it = 1; it <= 20; ++it) {
      const auto p = at(u[2]);
      Vec3 F;
      F.head<2>() = G(p, u[0], u[1]);
      F[2] = t.dot(u - pred);
      if (!F.allFinite()) return std::nullopt;
      Eigen::Matrix3d A;
      A.topRows<2>() = jac(u);
      A.row(2) = t.transpose();
      const Vec3 du = A.partialPivLu().solve(-F);
      if (!du.allFinite()) return std::nullopt;
      u += du;
      const double res = G(at(u[2]), u[0], u[1]).cwiseAbs().maxCoeff();
      if (res <= newton_tol || (du.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + u.norm()) && res <= 1e-10)) {
        if (iters) *iters = it;
        return u;
      }
    }
    return std::nullopt;
  }

  // Newton on G = 0 at fixed parameter.
  std::optional<Vec3> correct_fixed(Vec3 u) const {
    const auto p = at(u[2]);
    for (int it = 0; it < 30; ++it) {
      const Eigen::Vector2d F = G(p, u[0], u[1]);
      if (F.cwiseAbs().maxCoeff() <= newton_tol) return u;
      const Eigen::Vector2d d = dG_dstate(p, u[0], u[1]).partialPivLu().solve(-F);
      if (!d.allFinite()) return std::nullopt;
      u.head<2>() += d;
      if (d.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + u.head<2>().norm())) return u;
    }
    return G(p, u[0], u[1]).cwiseAbs().maxCoeff() <= 1e-10 ? std::optional<Vec3>(u) : std::nullopt;
  }
};

struct Tests {
  double fold;   // parameter component of the tangent
  double trace;  // meaningful only when det > 0
  double det;
  double disc;   // tr^2 - 4 det
};

Tests evaluate_tests(const Ctx& c, const Vec3& u, const Vec3& t) {
  const Matrix2 J = jacobian(c.at(u[2]), {u[0], u[1]});
  const double tr = J.trace();
  const double det = J.determinant();
  return {t[2], tr, det, tr * tr - 4.0 * det};
}

BifurcationEvent refine_event(const Ctx& c, BifurcationKind kind, const Vec3& ua, const Vec3& ta,
                              double sigma_end, double tol, int branch_id) {
  auto test_at = [&](double sigma, Vec3& u_out) -> std::optional<double> {
    const auto u = sigma == 0.0 ? std::optional<Vec3>(ua) : c.correct(ua + sigma * ta, ta);
    if (!u) return std::nullopt;
    u_out = *u;
    const auto tv = evaluate_tests(c, *u, c.tangent(*u, ta));
    switch (kind) {
      case BifurcationKind::Fold: return tv.fold;
      case BifurcationKind::Hopf: return tv.trace;
      default: return tv.disc;
    }
  };

  Vec3 u_lo = ua;
  Vec3 u_hi = Vec3::Zero();
  double s_lo = 0.0;
  double s_hi = sigma_end;
  auto f_lo = test_at(s_lo, u_lo);
  auto f_hi = test_at(s_hi, u_hi);
  if (f_lo && f_hi) {
    for (int it = 0; it < 200; ++it) {
      const bool narrow_param = std::abs(c.mu(u_hi[2]) - c.mu(u_lo[2])) <= tol;
      const bool narrow_arc = s_hi - s_lo <= 1e-11;
      if (narrow_param && (narrow_arc || kind != BifurcationKind::Fold)) break;
      const double s_mid = 0.5 * (s_lo + s_hi);
      Vec3 u_mid;
      const auto f_mid = test_at(s_mid, u_mid);
      if (!f_mid) break;
      if (std::signbit(*f_mid) == std::signbit(*f_lo)) {
        s_lo = s_mid;
        u_lo = u_mid;
        f_lo = f_mid;
      } else {
        s_hi = s_mid;
        u_hi = u_mid;
      }
    }
  }

  BifurcationEvent ev;
  ev.kind = kind;
  ev.param = c.param;
  ev.branch_id = branch_id;
  ev.bracket_lo = std::min(c.mu(u_lo[2]), c.mu(u_hi[2]));
  ev.bracket_hi = std::max(c.mu(u_lo[2]), c.mu(u_hi[2]));
  const Vec3 u_mid = 0.5 * (u_lo + u_hi);
  ev.param_value = c.mu(u_mid[2]);
  ev.location = {u_mid[0], u_mid[1]};
  ev.eigenvalues = eigenvalues(jacobian(c.at(u_mid[2]), ev.location));
  switch (kind) {
    case BifurcationKind::Fold: ev.note = "turning point of the interior branch"; break;
    case BifurcationKind::Hopf: ev.note = "Re of complex pair crosses zero; criticality not assessed"; break;
    default: ev.note = "eigenvalue discriminant changes sign"; break;
  }
  return ev;
}

Equilibrium make_equilibrium(const Ctx& c, const Vec3& u, const ClassifyTolerances& tol) {
  Equilibrium e;
  e.location = {u[0], u[1]};
  e.kind = EquilibriumKind::Interior;
  return classify(c.at(u[2]), e, tol);
}

}  // namespace

std::string_view to_string(BifurcationKind k) noexcept {
  switch (k) {
    case BifurcationKind::Transcritical: return "Transcritical";
    case BifurcationKind::SaddleNode: return "SaddleNode";
    case BifurcationKind::Hopf: return "Hopf";
    case BifurcationKind::Fold: return "Fold";
    case BifurcationKind::FocusNodeTransition: return "FocusNodeTransition";
  }
  return "?";
}

CriticalXi transcritical_xi_critical(const ModelParams& p, double bracket_tol) {
  const double denom = p.delta - p.m * p.alpha;
  if (denom == 0.0) throw DomainError("degenerate parameters: delta = m alpha");
  const double g2 = p.gamma * p.gamma;
  CriticalXi out;
  out.xi_star = (p.m * (1.0 + g2) - p.delta * g2) / denom;

  const ModelParams pc = with(p, Param::Xi, out.xi_star);
  const double A = pc.food_load() + g2;
  const double L = pc.food_load();
  auto& s = out.sotomayor;
  // V = (1, -A/gamma^2), W = (0, 1) at E1 = (gamma, 0).
  s.w_h_mu = 0.0;
  s.w_dh_mu_v = -p.delta * (1.0 + (1.0 - p.alpha) * g2) / (g2 * A);
  s.w_d2h_vv = (-2.0 * p.epsilon * A * A * A - 4.0 * p.delta * g2 * p.gamma * (L - pc.xi)) / (g2 * g2 * A);
  s.saddle_node_conditions = false;
  s.transcritical_conditions =
      std::abs(s.w_dh_mu_v) > kSotomayorFloor && std::abs(s.w_d2h_vv) > kSotomayorFloor;
  if (!s.transcritical_conditions) {
    throw DomainError("transcritical nondegeneracy fails: 1 + (1 - alpha) gamma^2 or W.D2H(V,V) vanishes");
  }

  out.location = {p.gamma, 0.0};
  out.eigenvalues = eigenvalues(jacobian(pc, out.location));
  // J(E1) is upper triangular; its (1,1) entry is the eigenvalue that crosses zero.
  const auto lambda2 = [&](double xi) { return jacobian(with(p, Param::Xi, xi), {p.gamma, 0.0})(1, 1); };
  const double h = 1e-3 * std::max(1.0, std::abs(out.xi_star));
  const auto b = bisect(lambda2, out.xi_star - h, out.xi_star + h, bracket_tol);
  out.bracket_lo = b.lo;
  out.bracket_hi = b.hi;
  return out;
}

CriticalXi saddlenode_xi_critical(const ModelParams& p, double bracket_tol) {
  const double denom = p.delta - p.m * p.alpha;
  if (denom == 0.0) throw DomainError("degenerate parameters: delta = m alpha");
  CriticalXi out;
  out.xi_star = p.m / denom;

  const ModelParams pc = with(p, Param::Xi, out.xi_star);
  const double L = pc.food_load();
  const double phi1 = predator_intercept_numerator(pc);
  const double y2 = phi1 / (p.epsilon * L);
  out.location = {0.0, std::abs(y2) <= 1e-14 ? 0.0 : y2};
  out.eigenvalues = eigenvalues(jacobian(pc, out.location));

  auto& s = out.sotomayor;
  // At the collision point J = diag(1, 0): V = W = (0, 1).
  s.w_h_mu = p.delta * out.location.y / (L * L);
  s.w_dh_mu_v = p.delta / (L * L);
  s.w_d2h_vv = -2.0 * p.epsilon;
  s.saddle_node_conditions = std::abs(s.w_h_mu) > kSotomayorFloor && std::abs(s.w_d2h_vv) > kSotomayorFloor;
  s.transcritical_conditions = std::abs(s.w_h_mu) <= kSotomayorFloor &&
                               std::abs(s.w_dh_mu_v) > kSotomayorFloor &&
                               std::abs(s.w_d2h_vv) > kSotomayorFloor;

  // E2 exists exactly where J(E0)(1,1) = phi1 / (1 + alpha xi) > 0.
  const auto lambda = [&](double xi) { return jacobian(with(p, Param::Xi, xi), {0.0, 0.0})(1, 1); };
  const double h = 1e-3 * std::max(1.0, std::abs(out.xi_star));
  const auto b = bisect(lambda, out.xi_star - h, out.xi_star + h, bracket_tol);
  out.bracket_lo = b.lo;
  out.bracket_hi = b.hi;
  return out;
}

std::size_t ContinuationResult::count(BifurcationKind k) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [k](const BifurcationEvent& e) { return e.kind == k; }));
}

ContinuationResult continue_branch(const ModelParams& p, Param param, std::pair<double, double> range,
                                   const Equilibrium& seed, const ContinuationOptions& opts, int branch_id) {
  const auto [lo, hi] = range;
  if (!(hi > lo)) throw DomainError("continuation range must be increasing");
  const double mu_seed = get(p, param);
  if (mu_seed < lo - 1e-12 * (1.0 + std::abs(lo)) || mu_seed > hi + 1e-12 * (1.0 + std::abs(hi))) {
    throw DomainError("seed parameter value lies outside the continuation range");
  }
  const double seed_res = G(p, seed.location.x, seed.location.y).cwiseAbs().maxCoeff();
  if (!(seed.location.x > 0.0 && seed.location.y > 0.0) || !(seed_res <= 1e-9)) {
    throw DomainError("seed is not a polished interior equilibrium");
  }

  const Ctx c{p, param, lo, hi - lo, opts.newton_tol};
  ContinuationResult out;

  Vec3 u(seed.location.x, seed.location.y, (mu_seed - lo) / c.width);
  if (auto polished = c.correct_fixed(u)) u = *polished;
  Vec3 t = c.tangent(u, Vec3(0.0, 0.0, opts.direction >= 0 ? 1.0 : -1.0));
  out.points.push_back({c.mu(u[2]), make_equilibrium(c, u, opts.classify), branch_id});

  double ds = opts.initial_step;
  int halvings = 0;
  while (out.points.size() < opts.max_points) {
    int iters = 0;
    const auto next = c.correct(u + ds * t, t, &iters);
    Vec3 t_next;
    bool ok = next.has_value();
    if (ok) {
      t_next = c.tangent(*next, t);
      // Reject steps that turn too sharply; they may jump between branches.
      ok = t_next.dot(t) > 0.95;
    }
    if (!ok) {
      ds *= 0.5;
      if (++halvings > opts.max_halvings) {
        out.truncated = true;
        std::ostringstream msg;
        msg << "step-size underflow at " << to_string(param) << "=" << c.mu(u[2]);
        out.notice = msg.str();
        break;
      }
      continue;
    }
    halvings = 0;
    Vec3 un = *next;

    const auto ta = evaluate_tests(c, u, t);
    const auto tb = evaluate_tests(c, un, t_next);
    const double sigma_end = t.dot(un - u);
    std::vector<BifurcationEvent> found;
    if (std::signbit(ta.fold) != std::signbit(tb.fold) && ta.fold != 0.0) {
      found.push_back(refine_event(c, BifurcationKind::Fold, u, t, sigma_end, opts.event_tol, branch_id));
    }
    if (ta.det > 0.0 && tb.det > 0.0 && std::signbit(ta.trace) != std::signbit(tb.trace)) {
      found.push_back(refine_event(c, BifurcationKind::Hopf, u, t, sigma_end, opts.event_tol, branch_id));
    }
    if (std::signbit(ta.disc) != std::signbit(tb.disc) && ta.disc != 0.0) {
      found.push_back(
          refine_event(c, BifurcationKind::FocusNodeTransition, u, t, sigma_end, opts.event_tol, branch_id));
    }

    const bool leaves_range = un[2] < 0.0 || un[2] > 1.0;
    if (leaves_range) {
      // Land exactly on the range end by a fixed-parameter correction.
      const double s_end = un[2] > 1.0 ? 1.0 : 0.0;
      const double w = (s_end - u[2]) / (un[2] - u[2]);
      Vec3 guess = u + w * (un - u);
      guess[2] = s_end;
      if (auto landed = c.correct_fixed(guess)) un = *landed;
      else un = guess;
    }
    for (auto& ev : found) {
      if (ev.param_value >= lo && ev.param_value <= hi) out.events.push_back(std::move(ev));
    }
    if (!(un[0] > 0.0 && un[1] > 0.0 && un[0] < p.gamma)) {
      out.notice = "branch left the open positive quadrant";
      break;
    }
    out.points.push_back({c.mu(un[2]), make_equilibrium(c, un, opts.classify), branch_id});
    if (leaves_range) break;

    u = un;
    t = t_next;
    if (iters <= 3) ds = std::min(1.5 * ds, opts.max_step);
    else if (iters >= 6) ds *= 0.7;
  }
  if (out.points.size() >= opts.max_points) {
    out.truncated = true;
    out.notice = "point budget exhausted";
  }
  return out;
}

std::vector<ContinuationResult> continue_all_branches(const ModelParams& p, Param param,
                                                      std::pair<double, double> range,
                                                      const ContinuationOptions& opts) {
  std::vector<ContinuationResult> out;
  auto covered = [&](double mu, State s) {
    for (const auto& br : out) {
      for (const auto& pt : {br.points.front(), br.points.back()}) {
        if (std::abs(pt.param_value - mu) <= 1e-9 * (1.0 + std::abs(mu)) &&
            std::abs(pt.equilibrium.location.x - s.x) <= 1e-6 * (1.0 + s.x) &&
            std::abs(pt.equilibrium.location.y - s.y) <= 1e-6 * (1.0 + s.y)) {
          return true;
        }
      }
    }
    return false;
  };
  int id = 0;
  for (const auto& [mu, dir] : {std::pair{range.first, +1}, std::pair{range.second, -1}}) {
    const ModelParams pm = with(p, param, mu);
    for (const auto& e : find_interior_equilibria(pm, opts.classify)) {
      if (covered(mu, e.location)) continue;
      ContinuationOptions o = opts;
      o.direction = dir;
      out.push_back(continue_branch(pm, param, range, e, o, id++));
    }
  }
  return out;
}

std::vector<BifurcationEvent> detect_hopf(const ModelParams& p, Param param, std::pair<double, double> range,
                                          const ContinuationOptions& opts) {
  std::vector<BifurcationEvent> out;
  for (const auto& br : continue_all_branches(p, param, range, opts)) {
    for (const auto& ev : br.events) {
      if (ev.kind == BifurcationKind::Hopf) out.push_back(ev);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const BifurcationEvent& a, const BifurcationEvent& b) { return a.param_value < b.param_value; });
  return out;
}

SweepResult hysteresis_sweep(const ModelParams& p, double eps_min, double eps_max, double period, int cycles,
                             State initial, const SimulationOptions& opts, std::size_t samples_per_cycle) {
  if (!(eps_min > 0.0) || eps_max < eps_min) throw DomainError("need 0 < eps_min <= eps_max");
  if (!(period > 0.0) || cycles < 1) throw DomainError("need period > 0 and cycles >= 1");
  if (samples_per_cycle < 3) throw DomainError("need at least 3 samples per cycle");

  SweepResult out;
  out.eps_min = eps_min;
  out.eps_max = eps_max;
  out.period = period;
  out.cycles = cycles;
  const double mid = 0.5 * (eps_min + eps_max);
  const double half = 0.5 * (eps_max - eps_min);
  const EpsSchedule eps = [=](double t) { return mid + half * std::sin(2.0 * std::numbers::pi * t / period); };

  SimulationOptions o = opts;
  o.t_start = 0.0;
  const double t_end = period * cycles;
  out.trajectory = integrate_nonautonomous(p, eps, initial, t_end, o);

  const double t0 = t_end - period;
  std::vector<double> es(samples_per_cycle);
  std::vector<double> xs(samples_per_cycle);
  std::vector<double> ts(samples_per_cycle);
  for (std::size_t i = 0; i < samples_per_cycle; ++i) {
    ts[i] = t0 + period * static_cast<double>(i) / static_cast<double>(samples_per_cycle);
    es[i] = eps(ts[i]);
    xs[i] = out.trajectory.at(ts[i]).x;
  }
  // Shoelace over the closed polygon.
  double area = 0.0;
  for (std::size_t i = 0; i < samples_per_cycle; ++i) {
    const std::size_t j = (i + 1) % samples_per_cycle;
    area += es[i] * xs[j] - es[j] * xs[i];
  }
  out.loop_area_proxy = 0.5 * area;

  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  out.jump_threshold = 0.5 * (*xmin + *xmax);
  for (std::size_t i = 0; i + 1 < samples_per_cycle; ++i) {
    const double a = xs[i] - out.jump_threshold;
    const double b = xs[i + 1] - out.jump_threshold;
    if ((a < 0.0) == (b < 0.0)) continue;
    const double w = a / (a - b);
    const double tc = ts[i] + w * (ts[i + 1] - ts[i]);
    out.jumps.push_back({tc, eps(tc), b > a});
  }
  return out;
}

}  // namespace afpp
