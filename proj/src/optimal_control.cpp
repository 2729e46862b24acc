#include "afpp/optimal_control.hpp"

#include "afpp/ode.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace afpp::control {
namespace {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat24 = Eigen::Matrix<double, 2, 4>;
using Mat34 = Eigen::Matrix<double, 3, 4>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Augmented field (fx, fy, dt/ds) with its state Jacobian and control derivative.
struct FieldEval {
  Vec3 f;
  Mat32 jz;
  Vec3 fu;
};

FieldEval field(const ModelParams& p, const Vec2& z, double u, ControlKind k) {
  const double x = z[0];
  const double y = z[1];
  const double alpha = k == ControlKind::Quality ? u : p.alpha;
  const double xi = k == ControlKind::Quantity ? u : p.xi;
  const double D = 1.0 + alpha * xi + x * x;
  const double logistic = x * (1.0 - x / p.gamma);
  const double loss = p.m * y + p.epsilon * y * y;
  const double dD_du = k == ControlKind::Quality ? xi : alpha;

  FieldEval e;
  e.f << logistic * D - x * x * y, p.delta * (x * x + xi) * y - D * loss, D;
  e.jz << (1.0 - 2.0 * x / p.gamma) * D + 2.0 * x * logistic - 2.0 * x * y, -x * x,
      2.0 * p.delta * x * y - 2.0 * x * loss, p.delta * (x * x + xi) - D * (p.m + 2.0 * p.epsilon * y),
      2.0 * x, 0.0;
  e.fu << logistic * dD_du, -dD_du * loss, dD_du;
  if (k == ControlKind::Quantity) e.fu[1] += p.delta * y;
  return e;
}

// One RK4 step of the augmented system; derivative columns are (z1, z2, u, h).
struct Rk4Step {
  Vec3 phi;
  Mat34 dphi;
};

Rk4Step rk4_step(const ModelParams& p, const Vec2& z, double u, double h, ControlKind kind) {
  static constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
  static constexpr double w[4] = {1.0, 2.0, 2.0, 1.0};
  Mat24 dz0 = Mat24::Zero();
  dz0(0, 0) = 1.0;
  dz0(1, 1) = 1.0;

  Rk4Step out;
  out.phi << z, 0.0;
  out.dphi.setZero();
  out.dphi.topRows<2>() = dz0;
  Vec3 sum_k = Vec3::Zero();
  Mat34 sum_dk = Mat34::Zero();
  Vec3 kprev = Vec3::Zero();
  Mat34 dkprev = Mat34::Zero();
  for (int i = 0; i < 4; ++i) {
    const Vec2 Z = z + c[i] * h * kprev.head<2>();
    Mat24 dZ = dz0 + c[i] * h * dkprev.topRows<2>();
    dZ.col(3) += c[i] * kprev.head<2>();
    const FieldEval e = field(p, Z, u, kind);
    Mat34 dk = e.jz * dZ;
    dk.col(2) += e.fu;
    sum_k += w[i] * e.f;
    sum_dk += w[i] * dk;
    kprev = e.f;
    dkprev = dk;
  }
  out.phi += h / 6.0 * sum_k;
  out.dphi += h / 6.0 * sum_dk;
  out.dphi.col(3) += sum_k / 6.0;
  return out;
}

Vec2 vec(State s) { return {s.x, s.y}; }
State state(const Vec2& v) { return {v[0], v[1]}; }

// Joint state-costate field in s for a fixed control.
Eigen::Vector4d joint_rhs(const ModelParams& p, const Eigen::Vector4d& w, double u, ControlKind k) {
  const State s{w[0], w[1]};
  const StateDerivative f = transformed_rhs(p, s, u, k);
  const Costate a = adjoint_rhs(p, s, {w[2], w[3]}, u, k);
  return {f.dx, f.dy, a.p, a.q};
}

double objective_weight(const ControlProblem& prob) { return prob.in_transformed_time ? 0.0 : 1.0; }

double dD_du(const ModelParams& p, ControlKind k) { return k == ControlKind::Quality ? p.xi : p.alpha; }

std::vector<std::size_t> switch_nodes(const std::vector<double>& u, double mid) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k < u.size(); ++k) {
    if ((u[k - 1] > mid) != (u[k] > mid)) out.push_back(k);
  }
  return out;
}

}  // namespace

std::string_view to_string(ControlKind k) noexcept {
  return k == ControlKind::Quality ? "quality" : "quantity";
}

ControlKind control_kind_from_string(std::string_view name) {
  if (name == "quality" || name == "alpha") return ControlKind::Quality;
  if (name == "quantity" || name == "xi") return ControlKind::Quantity;
  throw DomainError("unknown control kind '" + std::string(name) + "'");
}

std::pair<double, double> default_bounds(ControlKind k) noexcept {
  return k == ControlKind::Quality ? std::pair{0.5, 2.0} : std::pair{0.05, 1.0};
}

void ControlProblem::validate() const {
  if (!(std::isfinite(u_min) && std::isfinite(u_max) && u_min < u_max)) {
    throw DomainError("control bounds need u_min < u_max");
  }
  if (u_min < 0.0) throw DomainError("control bounds must be non-negative");
  auto positive = [](State s) { return std::isfinite(s.x) && std::isfinite(s.y) && s.x > 0.0 && s.y > 0.0; };
  if (!positive(initial)) throw DomainError("initial state must lie in the open positive quadrant");
  if (!positive(target)) throw DomainError("target state must lie in the open positive quadrant");
  if (mesh_size < 20) throw DomainError("mesh_size must be at least 20");
  controlled_params(params, u_min, control).validate();
}

ModelParams controlled_params(const ModelParams& p, double u, ControlKind k) noexcept {
  return with(p, k == ControlKind::Quality ? Param::Alpha : Param::Xi, u);
}

StateDerivative transformed_rhs(const ModelParams& p, State s, double u, ControlKind k) noexcept {
  const FieldEval e = field(p, vec(s), u, k);
  return {e.f[0], e.f[1]};
}

double time_scale(const ModelParams& p, State s, double u, ControlKind k) noexcept {
  const ModelParams q = controlled_params(p, u, k);
  return q.food_load() + s.x * s.x;
}

double hamiltonian(const ModelParams& p, State s, Costate c, double u, ControlKind k) noexcept {
  const FieldEval e = field(p, vec(s), u, k);
  return c.p * e.f[0] + c.q * e.f[1];
}

Costate adjoint_rhs(const ModelParams& p, State s, Costate c, double u, ControlKind k) noexcept {
  const FieldEval e = field(p, vec(s), u, k);
  return {-(c.p * e.jz(0, 0) + c.q * e.jz(1, 0)), -(c.p * e.jz(0, 1) + c.q * e.jz(1, 1))};
}

double switching_function(const ModelParams& p, State s, Costate c, ControlKind k) noexcept {
  const FieldEval e = field(p, vec(s), 0.0, k);
  return c.p * e.fu[0] + c.q * e.fu[1];
}

bool SingularRatios::candidate(double tol) const noexcept {
  return !excluded && std::abs(ratio1 - ratio2) <= tol * (1.0 + std::abs(ratio1));
}

SingularRatios singular_arc_ratios(const ModelParams& p, State s, double u, ControlKind k) noexcept {
  const ModelParams q = controlled_params(p, u, k);
  const double x = s.x;
  const double y = s.y;
  const double g = q.gamma;
  const double d = q.delta;
  const double m = q.m;
  const double e = q.epsilon;
  const double logistic = 1.0 - x / g;
  double n1 = 0.0, d1 = 0.0, n2 = 0.0, d2 = 0.0;
  if (k == ControlKind::Quality) {
    n1 = m * y + e * y * y;
    d1 = x * logistic;
    n2 = y * (2.0 * x * x * logistic * (d - m - e * y) + d * e * y * (x * x + q.xi));
    d2 = x * x * (y - m * y - e * y * y - 2.0 * x + 4.0 * x * x / g - 2.0 * x * x * x / (g * g));
  } else {
    const double a = q.alpha;
    n1 = y * (a * (m + e * y) - d);
    d1 = a * x * logistic;
    n2 = y * (d * e * y * (1.0 + x * x - a * x * x) - 2.0 * a * x * x * (d - m - e * y) * logistic);
    d2 = x * x * (2.0 * a * x * logistic * logistic - (a + d - a * (m + e * y)) * y);
  }
  SingularRatios r;
  constexpr double floor = 1e-14;
  if (std::abs(d1) <= floor || std::abs(d2) <= floor) {
    r.ratio1 = r.ratio2 = kNaN;
    r.excluded = true;
    return r;
  }
  r.ratio1 = n1 / d1;
  r.ratio2 = n2 / d2;
  return r;
}

Reachability reachability(const ControlProblem& prob) {
  const ModelParams& p = prob.params;
  Reachability r;
  // x' <= x (1 - x/gamma) and (x^2 + xi)/(1 + alpha xi + x^2) <= max(1, xi/(1 + alpha xi)).
  r.prey_ceiling = std::max(prob.initial.x, p.gamma);
  double growth = -std::numeric_limits<double>::infinity();
  for (double u : {prob.u_min, prob.u_max}) {
    const ModelParams q = controlled_params(p, u, prob.control);
    growth = std::max(growth, (q.delta * std::max(1.0, q.xi / q.food_load()) - q.m) / q.epsilon);
  }
  r.predator_ceiling = std::max(prob.initial.y, growth);
  r.excess = std::max({0.0, prob.target.x - r.prey_ceiling, prob.target.y - r.predator_ceiling});
  r.reachable = r.excess <= 0.0;
  return r;
}

ControlSolution solve(const ControlProblem& prob) {
  prob.validate();
  const ModelParams& p = prob.params;
  const ControlKind kind = prob.control;
  ControlSolution sol;

  if (std::hypot(prob.initial.x - prob.target.x, prob.initial.y - prob.target.y) <= 1e-14) {
    sol.s_grid = {0.0};
    sol.t_grid = {0.0};
    sol.states = {prob.initial};
    sol.nlp_stats.status = "trivial";
    return sol;
  }

  const Reachability reach = reachability(prob);
  if (!reach.reachable) {
    throw InfeasibleError("target unreachable: it exceeds the analytic ceiling (prey " +
                              std::to_string(reach.prey_ceiling) + ", predator " +
                              std::to_string(reach.predator_ceiling) + ") by " + std::to_string(reach.excess),
                          reach.excess);
  }

  const int N = prob.mesh_size;
  const int n_state = 2 * (N - 1);
  const int u_off = n_state;
  const int s_idx = n_state + N;
  const int n = s_idx + 1;
  const double weight = objective_weight(prob);
  const Vec2 z_init = vec(prob.initial);
  const Vec2 z_target = vec(prob.target);

  auto node = [&](const nlp::Vector& v, int j) -> Vec2 {
    if (j == 0) return z_init;
    if (j == N) return z_target;
    return v.segment<2>(2 * (j - 1));
  };

  nlp::Problem nlp_problem;
  nlp_problem.lower = nlp::Vector::Zero(n);
  nlp_problem.upper = nlp::Vector::Constant(n, std::numeric_limits<double>::infinity());
  nlp_problem.lower.segment(u_off, N).setConstant(prob.u_min);
  nlp_problem.upper.segment(u_off, N).setConstant(prob.u_max);
  nlp_problem.lower[s_idx] = 1e-8;
  nlp_problem.evaluate = [&](const nlp::Vector& v, nlp::Evaluation& ev) {
    const double h = v[s_idx] / N;
    ev.c.resize(2 * N);
    ev.jac = nlp::Matrix::Zero(2 * N, n);
    ev.grad = nlp::Vector::Zero(n);
    ev.f = weight > 0.0 ? 0.0 : v[s_idx];
    if (weight == 0.0) ev.grad[s_idx] = 1.0;
    for (int k = 0; k < N; ++k) {
      const Rk4Step st = rk4_step(p, node(v, k), v[u_off + k], h, kind);
      ev.c.segment<2>(2 * k) = st.phi.head<2>() - node(v, k + 1);
      if (k >= 1) ev.jac.block<2, 2>(2 * k, 2 * (k - 1)) = st.dphi.topLeftCorner<2, 2>();
      if (k + 1 <= N - 1) ev.jac.block<2, 2>(2 * k, 2 * k) -= Eigen::Matrix2d::Identity();
      ev.jac.block<2, 1>(2 * k, u_off + k) = st.dphi.block<2, 1>(0, 2);
      ev.jac.block<2, 1>(2 * k, s_idx) = st.dphi.block<2, 1>(0, 3) / N;
      if (weight > 0.0) {
        ev.f += weight * st.phi[2];
        if (k >= 1) ev.grad.segment<2>(2 * (k - 1)) += weight * st.dphi.block<1, 2>(2, 0).transpose();
        ev.grad[u_off + k] += weight * st.dphi(2, 2);
        ev.grad[s_idx] += weight * st.dphi(2, 3) / N;
      }
    }
  };

  // Per-interval finite-difference Hessians of lambda_k' Phi_k, each clipped
  // to its positive semidefinite part, summed into the full matrix.
  nlp_problem.hessian = [&](const nlp::Vector& v, const nlp::Vector& lambda, nlp::Matrix& H) {
    const double h = v[s_idx] / N;
    H = nlp::Matrix::Zero(n, n);
    for (int k = 0; k < N; ++k) {
      const Vec2 lam = lambda.segment<2>(2 * k);
      Eigen::Vector4d w0;
      w0 << node(v, k), v[u_off + k], h;
      auto grad = [&](const Eigen::Vector4d& a) -> Eigen::Vector4d {
        const Rk4Step st = rk4_step(p, a.head<2>(), a[2], a[3], kind);
        return st.dphi.topRows<2>().transpose() * lam + weight * st.dphi.row(2).transpose();
      };
      Eigen::Matrix4d Hk;
      for (int j = 0; j < 4; ++j) {
        const double step = 1e-6 * (j == 3 ? h : std::max(1.0, std::abs(w0[j])));
        Eigen::Vector4d a = w0, b = w0;
        a[j] += step;
        b[j] -= step;
        Hk.col(j) = (grad(a) - grad(b)) / (2.0 * step);
      }
      Hk = 0.5 * (Hk + Hk.transpose()).eval();
      Hk.row(3) /= N;
      Hk.col(3) /= N;
      const int first = k == 0 ? 2 : 0;
      const int dim = 4 - first;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hk.bottomRightCorner(dim, dim));
      const Eigen::MatrixXd Hp =
          es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
      const int idx[4] = {2 * (k - 1), 2 * (k - 1) + 1, u_off + k, s_idx};
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) H(idx[first + a], idx[first + b]) += Hp(a, b);
      }
    }
  };

  // Straight-line guess; S0 is the transit time along it at the mid control.
  const double u_mid = 0.5 * (prob.u_min + prob.u_max);
  double s_guess = 0.0;
  constexpr int kGuessSamples = 200;
  for (int i = 0; i < kGuessSamples; ++i) {
    const double a = (i + 0.5) / kGuessSamples;
    const Vec2 z = (1.0 - a) * z_init + a * z_target;
    const double speed = field(p, z, u_mid, kind).f.head<2>().norm();
    s_guess += (z_target - z_init).norm() / kGuessSamples / std::max(speed, 1e-12);
  }
  s_guess = std::clamp(s_guess, 1e-3, 1e3);

  nlp::Result best;
  bool have = false;
  for (double scale : {1.0, 2.0, 0.5, 4.0}) {
    nlp::Vector x0(n);
    for (int j = 1; j < N; ++j) {
      const double a = static_cast<double>(j) / N;
      x0.segment<2>(2 * (j - 1)) = (1.0 - a) * z_init + a * z_target;
    }
    x0.segment(u_off, N).setConstant(u_mid);
    x0[s_idx] = scale * s_guess;
    nlp::Result r = nlp::solve_sqp(nlp_problem, x0, prob.nlp);
    const bool better = !have || r.constraint_violation < best.constraint_violation ||
                        (r.status == nlp::Status::Converged && best.status != nlp::Status::Converged);
    if (better) {
      best = std::move(r);
      have = true;
    }
    if (best.status == nlp::Status::Converged) break;
  }

  NlpStats& stats = sol.nlp_stats;
  stats.status = std::string(nlp::to_string(best.status));
  stats.iterations = best.iterations;
  stats.qp_iterations = best.qp_iterations;
  stats.variables = n;
  stats.constraints = 2 * N;
  stats.objective = best.objective;
  stats.stationarity = best.stationarity;
  stats.constraint_violation = best.constraint_violation;
  stats.complementarity = best.complementarity;
  if (!(best.constraint_violation <= 1e-6)) {
    throw InfeasibleError("NLP ended infeasible (" + stats.status + "), constraint violation " +
                              std::to_string(best.constraint_violation),
                          best.constraint_violation);
  }
  if (best.status != nlp::Status::Converged) {
    sol.warning = "NLP stopped with status " + stats.status + "; returning the best feasible iterate";
  }

  const nlp::Vector& v = best.x;
  const double S = v[s_idx];
  const double h = S / N;
  sol.S_opt = S;
  sol.s_grid.resize(N + 1);
  sol.t_grid.resize(N + 1);
  sol.states.resize(N + 1);
  sol.controls.resize(N);
  sol.sigma.resize(N);
  sol.costates.resize(N + 1);
  sol.s_grid[0] = 0.0;
  sol.t_grid[0] = 0.0;
  sol.states[0] = prob.initial;
  for (int k = 0; k < N; ++k) {
    const double u = v[u_off + k];
    const Rk4Step st = rk4_step(p, node(v, k), u, h, kind);
    const Vec2 lambda = best.lambda.segment<2>(2 * k);
    sol.controls[k] = u;
    sol.s_grid[k + 1] = (k + 1 == N) ? S : (k + 1) * h;
    sol.t_grid[k + 1] = sol.t_grid[k] + st.phi[2];
    sol.states[k + 1] = state(node(v, k + 1));
    sol.costates[k + 1] = {lambda[0], lambda[1]};
    sol.sigma[k] = (lambda.dot(st.dphi.block<2, 1>(0, 2)) + weight * st.dphi(2, 2)) / h;
    if (k == 0) {
      const Vec2 c0 = st.dphi.topLeftCorner<2, 2>().transpose() * lambda;
      sol.costates[0] = {c0[0], c0[1]};
    }
    const double defect = (st.phi.head<2>() - node(v, k + 1)).lpNorm<Eigen::Infinity>();
    stats.max_defect = std::max(stats.max_defect, defect);
    if (k + 1 == N) stats.endpoint_mismatch = defect;
  }
  sol.T_opt = sol.t_grid.back();

  for (std::size_t j : switch_nodes(sol.controls, u_mid)) {
    sol.switching_times_s.push_back(sol.s_grid[j]);
    sol.switching_times_t.push_back(sol.t_grid[j]);
  }
  return sol;
}

Calibration calibrate_bounds(const ControlProblem& prob, double target_T, double rel_tol,
                             std::vector<std::pair<double, double>> candidates) {
  if (!(target_T > 0.0)) throw DomainError("calibration target time must be positive");
  if (candidates.empty()) {
    candidates.push_back(default_bounds(prob.control));
    if (prob.control == ControlKind::Quality) {
      for (double hi : {2.0, 3.0, 4.0, 5.0, 10.0}) candidates.emplace_back(0.0, hi);
    } else {
      for (double hi : {2.0, 5.0, 10.0}) candidates.emplace_back(0.0, hi);
    }
  }
  Calibration cal;
  cal.problem = prob;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : candidates) {
    ControlProblem trial = prob;
    trial.u_min = lo;
    trial.u_max = hi;
    CalibrationAttempt att;
    att.u_min = lo;
    att.u_max = hi;
    try {
      ControlSolution s = solve(trial);
      att.feasible = true;
      att.T_opt = s.T_opt;
      att.note = s.nlp_stats.status;
      const double gap = std::abs(s.T_opt - target_T);
      if (gap < best_gap) {
        best_gap = gap;
        cal.problem = trial;
        cal.solution = std::move(s);
      }
    } catch (const InfeasibleError& e) {
      att.note = e.what();
    } catch (const NumericalError& e) {
      att.note = e.what();
    }
    cal.attempts.push_back(att);
    if (best_gap <= rel_tol * target_T) {
      cal.matched = true;
      break;
    }
  }
  return cal;
}

namespace {

// Costates at the nodes by backward RK4 on the joint system, restarting the
// state from each right node; sigma is the interval mean of dH/du.
void backward_adjoint(const ControlSolution& sol, const ControlProblem& prob, Costate terminal,
                      std::vector<Costate>& costates, std::vector<double>& sigma) {
  const std::size_t N = sol.controls.size();
  constexpr int kSub = 8;
  costates.assign(N + 1, {});
  sigma.assign(N, 0.0);
  costates[N] = terminal;
  const double w = objective_weight(prob);
  for (std::size_t k = N; k-- > 0;) {
    const double u = sol.controls[k];
    const double hs = -(sol.s_grid[k + 1] - sol.s_grid[k]) / kSub;
    Eigen::Vector4d z(sol.states[k + 1].x, sol.states[k + 1].y, costates[k + 1].p, costates[k + 1].q);
    auto sig = [&](const Eigen::Vector4d& a) {
      return switching_function(prob.params, {a[0], a[1]}, {a[2], a[3]}, prob.control) +
             w * dD_du(prob.params, prob.control);
    };
    double acc = 0.5 * sig(z);
    for (int i = 0; i < kSub; ++i) {
      const auto k1 = joint_rhs(prob.params, z, u, prob.control);
      const auto k2 = joint_rhs(prob.params, z + 0.5 * hs * k1, u, prob.control);
      const auto k3 = joint_rhs(prob.params, z + 0.5 * hs * k2, u, prob.control);
      const auto k4 = joint_rhs(prob.params, z + hs * k3, u, prob.control);
      z += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      acc += (i + 1 == kSub ? 0.5 : 1.0) * sig(z);
    }
    sigma[k] = acc / kSub;
    costates[k] = {z[2], z[3]};
  }
}

}  // namespace

PmpReport verify_pmp(const ControlSolution& sol, const ControlProblem& prob, const PmpOptions& opts) {
  PmpReport rep;
  const std::size_t N = sol.controls.size();
  if (N == 0) {
    rep.costate_source = "none";
    rep.fraction = 1.0;
    return rep;
  }
  const bool have_multipliers = sol.costates.size() == N + 1 && sol.sigma.size() == N;
  if (have_multipliers && !opts.force_adjoint) {
    rep.costate_source = "multipliers";
    rep.costates = sol.costates;
    rep.sigma = sol.sigma;
  } else {
    if (sol.costates.empty()) throw NumericalError("no terminal costate available for adjoint integration");
    if (!opts.force_adjoint) rep.warning = "multipliers unavailable; costates from backward adjoint integration";
    rep.costate_source = "adjoint";
    backward_adjoint(sol, prob, sol.costates.back(), rep.costates, rep.sigma);
  }

  double smax = 0.0;
  for (double s : rep.sigma) smax = std::max(smax, std::abs(s));
  rep.sigma_tol = opts.sigma_rel_tol * smax;

  const double mid = 0.5 * (prob.u_min + prob.u_max);
  const auto switches = switch_nodes(sol.controls, mid);
  std::vector<char> near_switch(N, 0);
  for (std::size_t j : switches) {
    near_switch[j - 1] = 1;
    near_switch[j] = 1;
  }
  std::size_t bang = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const double u = sol.controls[k];
    const bool at_max = std::abs(u - prob.u_max) <= opts.bound_tol;
    const bool at_min = std::abs(u - prob.u_min) <= opts.bound_tol;
    bang += at_max || at_min;
    const double s = rep.sigma[k];
    if (std::abs(s) <= rep.sigma_tol || near_switch[k]) {
      ++rep.excluded;
      continue;
    }
    ++rep.checked;
    rep.consistent += s < 0.0 ? at_max : at_min;
  }
  rep.bang_fraction = static_cast<double>(bang) / N;
  rep.fraction = rep.checked > 0 ? static_cast<double>(rep.consistent) / rep.checked : 0.0;

  rep.min_costate_norm = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rep.costates.size(); ++j) {
    rep.min_costate_norm = std::min(rep.min_costate_norm, std::hypot(rep.costates[j].p, rep.costates[j].q));
    const double u = sol.controls[std::min(j, N - 1)];
    rep.singular_candidates +=
        singular_arc_ratios(prob.params, sol.states[j], u, prob.control).candidate(opts.singular_tol);
  }

  for (std::size_t j : switches) {
    bool found = false;
    const std::size_t lo = j >= 2 ? j - 2 : 0;
    const std::size_t hi = std::min(N - 1, j + 1);
    for (std::size_t k = lo; k < hi; ++k) found = found || ((rep.sigma[k] < 0.0) != (rep.sigma[k + 1] < 0.0));
    rep.switches_bracketed = rep.switches_bracketed && found;
  }
  return rep;
}

ControlSolution constant_control_counterexample(const ControlSolution& sol, const ControlProblem& prob) {
  const std::size_t N = sol.controls.size();
  if (N == 0 || sol.costates.empty()) throw DomainError("counterexample needs a solved, non-trivial problem");
  const double mid = 0.5 * (prob.u_min + prob.u_max);
  ControlSolution out;
  out.s_grid = sol.s_grid;
  out.controls.assign(N, mid);
  out.states.resize(N + 1);
  out.t_grid.resize(N + 1);
  out.states[0] = prob.initial;
  out.t_grid[0] = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double h = out.s_grid[k + 1] - out.s_grid[k];
    const Rk4Step st = rk4_step(prob.params, vec(out.states[k]), mid, h, prob.control);
    out.states[k + 1] = state(st.phi.head<2>());
    out.t_grid[k + 1] = out.t_grid[k] + st.phi[2];
  }
  out.S_opt = sol.S_opt;
  out.T_opt = out.t_grid.back();
  out.nlp_stats.status = "constant_control";
  std::vector<double> sigma;
  backward_adjoint(out, prob, sol.costates.back(), out.costates, sigma);
  return out;
}

Resimulation resimulate_physical(const ControlSolution& sol, const ControlProblem& prob) {
  Resimulation r;
  r.times = sol.t_grid;
  r.states.reserve(sol.states.size());
  Vec2 z = vec(prob.initial);
  r.states.push_back(prob.initial);
  ode::StepperOptions so;
  so.rtol = 1e-11;
  so.atol = 1e-13;
  for (std::size_t k = 0; k < sol.controls.size(); ++k) {
    const ModelParams q = controlled_params(prob.params, sol.controls[k], prob.control);
    const ode::Field f = [&q](double, const Vec2& w) {
      const StateDerivative d = rhs(q, {w[0], w[1]});
      return Vec2(d.dx, d.dy);
    };
    const auto res = ode::dopri5(f, sol.t_grid[k], z, sol.t_grid[k + 1], so);
    if (res.status != ode::StepStatus::Ok || res.nodes.empty()) {
      throw NumericalError("physical re-simulation failed on interval " + std::to_string(k));
    }
    z = res.nodes.back().z;
    r.states.push_back(state(z));
  }
  r.final_state = state(z);
  r.target_error = std::hypot(z[0] - prob.target.x, z[1] - prob.target.y);
  return r;
}

}  // namespace afpp::control
