#include "afpp/sqp.hpp"

#include "afpp/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace afpp::nlp {
namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Largest step in (0, 1] keeping v + a dv >= (1 - tau) v on the masked entries.
double max_step(const Vector& v, const Vector& dv, const std::vector<char>& mask, double tau) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mask[i] && dv[i] < 0.0) a = std::min(a, -tau * v[i] / dv[i]);
  }
  return a;
}

}  // namespace

QPResult solve_box_qp(const Matrix& H, const Vector& g, const Matrix& A, const Vector& b, const Vector& lower,
                      const Vector& upper, double tol, int max_iter) {
  const Eigen::Index n = g.size();
  const Eigen::Index m = b.size();
  std::vector<char> has_l(n), has_u(n);
  QPResult r;
  r.d = Vector::Zero(n);
  r.y = Vector::Zero(m);
  r.z_lower = Vector::Zero(n);
  r.z_upper = Vector::Zero(n);
  int nb = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    has_l[i] = std::isfinite(lower[i]);
    has_u[i] = std::isfinite(upper[i]);
    if (has_l[i] && has_u[i] && !(upper[i] > lower[i])) throw DomainError("empty box in QP");
    nb += has_l[i] + has_u[i];
    double d = 0.0;
    if (has_l[i] && has_u[i]) {
      const double k = std::min(0.25 * (upper[i] - lower[i]), 1.0);
      d = std::clamp(0.0, lower[i] + k, upper[i] - k);
    } else if (has_l[i]) {
      d = std::max(0.0, lower[i] + 1.0);
    } else if (has_u[i]) {
      d = std::min(0.0, upper[i] - 1.0);
    }
    r.d[i] = d;
    if (has_l[i]) r.z_lower[i] = 1.0;
    if (has_u[i]) r.z_upper[i] = 1.0;
  }

  Vector sl = Vector::Zero(n);
  Vector su = Vector::Zero(n);
  auto slacks = [&] {
    for (Eigen::Index i = 0; i < n; ++i) {
      sl[i] = has_l[i] ? r.d[i] - lower[i] : 1.0;
      su[i] = has_u[i] ? upper[i] - r.d[i] : 1.0;
    }
  };
  slacks();

  const double gscale = 1.0 + inf_norm(g);
  const double bscale = 1.0 + inf_norm(b);
  Matrix K(n + m, n + m);
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    const Vector rd = H * r.d + g - A.transpose() * r.y - r.z_lower + r.z_upper;
    const Vector rp = A * r.d - b;
    double mu = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (has_l[i]) mu += sl[i] * r.z_lower[i];
      if (has_u[i]) mu += su[i] * r.z_upper[i];
    }
    mu = nb > 0 ? mu / nb : 0.0;
    if (inf_norm(rd) <= tol * gscale && inf_norm(rp) <= tol * bscale && mu <= tol) {
      r.converged = true;
      return r;
    }

    Vector sigma = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (has_l[i]) sigma[i] += r.z_lower[i] / sl[i];
      if (has_u[i]) sigma[i] += r.z_upper[i] / su[i];
    }
    K.setZero();
    K.topLeftCorner(n, n) = H;
    K.topLeftCorner(n, n).diagonal() += sigma + Vector::Constant(n, 1e-12);
    K.topRightCorner(n, m) = A.transpose();
    K.bottomLeftCorner(m, n) = A;
    K.bottomRightCorner(m, m).diagonal().setConstant(-1e-11);
    const Eigen::PartialPivLU<Matrix> lu(K);

    auto direction = [&](const Vector& rcl, const Vector& rcu, Vector& dd, Vector& dy, Vector& dzl, Vector& dzu) {
      Vector rhs(n + m);
      for (Eigen::Index i = 0; i < n; ++i) {
        double v = -rd[i];
        if (has_l[i]) v -= rcl[i] / sl[i];
        if (has_u[i]) v += rcu[i] / su[i];
        rhs[i] = v;
      }
      rhs.tail(m) = -rp;
      const Vector sol = lu.solve(rhs);
      dd = sol.head(n);
      dy = -sol.tail(m);
      dzl = Vector::Zero(n);
      dzu = Vector::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (has_l[i]) dzl[i] = (-rcl[i] - r.z_lower[i] * dd[i]) / sl[i];
        if (has_u[i]) dzu[i] = (-rcu[i] + r.z_upper[i] * dd[i]) / su[i];
      }
    };

    Vector rcl = sl.cwiseProduct(r.z_lower);
    Vector rcu = su.cwiseProduct(r.z_upper);
    Vector dd, dy, dzl, dzu;
    direction(rcl, rcu, dd, dy, dzl, dzu);
    if (!dd.allFinite()) return r;

    if (nb == 0) {
      r.d += dd;
      r.y += dy;
      continue;
    }

    const Vector dsl = dd;
    const Vector dsu = -dd;
    double ap = std::min(max_step(sl, dsl, has_l, 1.0), max_step(su, dsu, has_u, 1.0));
    double ad = std::min(max_step(r.z_lower, dzl, has_l, 1.0), max_step(r.z_upper, dzu, has_u, 1.0));
    double mu_aff = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (has_l[i]) mu_aff += (sl[i] + ap * dsl[i]) * (r.z_lower[i] + ad * dzl[i]);
      if (has_u[i]) mu_aff += (su[i] + ap * dsu[i]) * (r.z_upper[i] + ad * dzu[i]);
    }
    mu_aff /= nb;
    const double centering = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (has_l[i]) rcl[i] += dsl[i] * dzl[i] - centering * mu;
      if (has_u[i]) rcu[i] += dsu[i] * dzu[i] - centering * mu;
    }
    direction(rcl, rcu, dd, dy, dzl, dzu);
    if (!dd.allFinite()) return r;

    const double tau = std::max(0.99, 1.0 - mu);
    ap = std::min(max_step(sl, dd, has_l, tau), max_step(su, Vector(-dd), has_u, tau));
    ad = std::min(max_step(r.z_lower, dzl, has_l, tau), max_step(r.z_upper, dzu, has_u, tau));
    r.d += ap * dd;
    r.y += ad * dy;
    r.z_lower += ad * dzl;
    r.z_upper += ad * dzu;
    slacks();
  }
  return r;
}

namespace {

// Linearization may be inconsistent with the bounds: relax A d = b by
// nonnegative v - w at an l1 cost.
QPResult elastic_qp(const Matrix& H, const Vector& g, const Matrix& A, const Vector& b, const Vector& lower,
                    const Vector& upper, double penalty) {
  const Eigen::Index n = g.size();
  const Eigen::Index m = b.size();
  const Eigen::Index ne = n + 2 * m;
  Matrix He = Matrix::Zero(ne, ne);
  He.topLeftCorner(n, n) = H;
  Vector ge(ne);
  ge << g, Vector::Constant(2 * m, penalty);
  Matrix Ae(m, ne);
  Ae << A, Matrix::Identity(m, m), -Matrix::Identity(m, m);
  Vector le(ne), ue(ne);
  le << lower, Vector::Zero(2 * m);
  ue << upper, Vector::Constant(2 * m, std::numeric_limits<double>::infinity());
  QPResult e = solve_box_qp(He, ge, Ae, b, le, ue);
  QPResult r;
  r.d = e.d.head(n);
  r.y = e.y;
  r.z_lower = e.z_lower.head(n);
  r.z_upper = e.z_upper.head(n);
  r.iterations = e.iterations;
  r.converged = e.converged;
  return r;
}

}  // namespace

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIterations: return "max_iterations";
    case Status::LineSearchFailure: return "line_search_failure";
    case Status::QPFailure: return "qp_failure";
  }
  return "?";
}

Result solve_sqp(const Problem& problem, Vector x0, const Options& opts) {
  const Eigen::Index n = x0.size();
  if (problem.lower.size() != n || problem.upper.size() != n) throw DomainError("bound sizes do not match x0");
  Vector x = x0.cwiseMax(problem.lower).cwiseMin(problem.upper);

  Evaluation ev;
  problem.evaluate(x, ev);
  const Eigen::Index m = ev.c.size();

  Result res;
  res.lambda = Vector::Zero(m);
  res.z_lower = Vector::Zero(n);
  res.z_upper = Vector::Zero(n);
  Matrix B = Matrix::Identity(n, n);
  bool fresh_hessian = true;
  const bool supplied_hessian = static_cast<bool>(problem.hessian);
  bool have_multipliers = false;
  bool identity_once = false;
  double nu = 1.0;
  int stalled = 0;

  auto measure = [&](const Evaluation& e, const Vector& xv) {
    res.objective = e.f;
    res.constraint_violation = inf_norm(e.c);
    res.stationarity =
        inf_norm(Vector(e.grad + e.jac.transpose() * res.lambda - res.z_lower + res.z_upper));
    double comp = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::isfinite(problem.lower[i])) comp = std::max(comp, std::abs(res.z_lower[i]) * (xv[i] - problem.lower[i]));
      if (std::isfinite(problem.upper[i])) comp = std::max(comp, std::abs(res.z_upper[i]) * (problem.upper[i] - xv[i]));
    }
    res.complementarity = comp;
  };

  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    measure(ev, x);
    if (res.iterations > 0 && res.stationarity <= opts.kkt_tol &&
        res.constraint_violation <= opts.feasibility_tol && res.complementarity <= opts.kkt_tol) {
      res.status = Status::Converged;
      break;
    }

    if (supplied_hessian) {
      if (have_multipliers && !identity_once) {
        problem.hessian(x, res.lambda, B);
        B.diagonal().array() += 1e-8;
        fresh_hessian = false;
      } else {
        B.setIdentity();
        fresh_hessian = true;
      }
      identity_once = false;
    }

    const Vector lo = problem.lower - x;
    const Vector hi = problem.upper - x;
    auto qp = solve_box_qp(B, ev.grad, ev.jac, Vector(-ev.c), lo, hi);
    res.qp_iterations += qp.iterations;
    if (!qp.converged && !fresh_hessian) {
      B.setIdentity();
      fresh_hessian = true;
      qp = solve_box_qp(B, ev.grad, ev.jac, Vector(-ev.c), lo, hi);
      res.qp_iterations += qp.iterations;
    }
    if (!qp.converged) {
      qp = elastic_qp(B, ev.grad, ev.jac, Vector(-ev.c), lo, hi, std::max(100.0, 10.0 * nu));
      res.qp_iterations += qp.iterations;
    }
    if (!qp.converged || !qp.d.allFinite()) {
      res.status = Status::QPFailure;
      break;
    }
    const Vector lambda_new = -qp.y;
    // Powell's update: the penalty follows the multipliers down as well as up.
    const double nu_req = 1.1 * inf_norm(lambda_new) + 1e-6;
    nu = nu < nu_req ? std::max(nu_req, 1.5 * nu) : std::max(nu_req, 0.5 * (nu + nu_req));

    const double phi0 = ev.f + nu * ev.c.lpNorm<1>();
    const double dphi = ev.grad.dot(qp.d) + nu * ((ev.c + ev.jac * qp.d).lpNorm<1>() - ev.c.lpNorm<1>());
    double alpha = 1.0;
    Evaluation trial;
    Vector x_trial;
    bool accepted = false;
    while (alpha >= 1e-10) {
      x_trial = (x + alpha * qp.d).cwiseMax(problem.lower).cwiseMin(problem.upper);
      problem.evaluate(x_trial, trial);
      const double phi = trial.f + nu * trial.c.lpNorm<1>();
      if (std::isfinite(phi) && phi <= phi0 + 1e-4 * alpha * std::min(dphi, 0.0)) {
        accepted = true;
        break;
      }
      if (alpha == 1.0 && m > 0 && trial.c.allFinite()) {
        // Second-order correction against the Maratos effect.
        const Matrix AAt = ev.jac * ev.jac.transpose();
        const Vector dc = -ev.jac.transpose() * AAt.ldlt().solve(trial.c);
        Evaluation soc;
        const Vector x_soc = (x + qp.d + dc).cwiseMax(problem.lower).cwiseMin(problem.upper);
        problem.evaluate(x_soc, soc);
        const double phi_soc = soc.f + nu * soc.c.lpNorm<1>();
        if (dc.allFinite() && std::isfinite(phi_soc) && phi_soc <= phi0 + 1e-4 * std::min(dphi, 0.0)) {
          x_trial = x_soc;
          trial = std::move(soc);
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!fresh_hessian) {
        B.setIdentity();
        fresh_hessian = true;
        identity_once = true;
        continue;
      }
      res.status = Status::LineSearchFailure;
      break;
    }

    const Vector s = x_trial - x;
    // Damped BFGS on the Lagrangian gradient difference.
    const Vector yv = (trial.grad + trial.jac.transpose() * lambda_new) - (ev.grad + ev.jac.transpose() * lambda_new);
    const Vector Bs = B * s;
    const double sBs = s.dot(Bs);
    if (!supplied_hessian && sBs > 1e-300) {
      const double sy = s.dot(yv);
      const double theta = sy >= 0.2 * sBs ? 1.0 : 0.8 * sBs / (sBs - sy);
      const Vector r = theta * yv + (1.0 - theta) * Bs;
      const double sr = s.dot(r);
      if (sr > 1e-300) {
        B += r * r.transpose() / sr - Bs * Bs.transpose() / sBs;
        fresh_hessian = false;
      }
    }

    stalled = inf_norm(s) <= 1e-15 * (1.0 + inf_norm(x)) ? stalled + 1 : 0;
    x = x_trial;
    ev = std::move(trial);
    res.lambda = lambda_new;
    have_multipliers = true;
    res.z_lower = qp.z_lower;
    res.z_upper = qp.z_upper;
    if (stalled >= 5) {
      measure(ev, x);
      res.status = Status::LineSearchFailure;
      break;
    }
  }
  if (res.iterations >= opts.max_iter) measure(ev, x);
  res.x = x;
  return res;
}

}  // namespace afpp::nlp
