#include "afpp/checks.hpp"

#include "afpp/equilibria.hpp"
#include "afpp/io.hpp"
#include "afpp/optimal_control.hpp"
#include "afpp/polynomial.hpp"
#include "afpp/simulation.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

namespace afpp::checks {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double central(const std::function<double(double)>& f, double x) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Runs body(rng) -> metric per sample; fails samples whose metric exceeds tol.
SuiteResult run_suite(const char* name, std::uint64_t seed, std::size_t samples, double tol,
                      const std::function<double(std::mt19937_64&, ModelParams&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = name;
  r.tolerance = tol;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    ModelParams p;
    double metric = 0.0;
    try {
      metric = body(rng, p);
    } catch (const Error&) {
      metric = std::numeric_limits<double>::infinity();
    }
    ++r.samples;
    if (!(metric <= tol)) ++r.failures;
    if (!(metric <= r.worst)) {
      r.worst = std::isnan(metric) ? std::numeric_limits<double>::infinity() : metric;
      r.worst_case = io::to_json(p).dump();
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

bool hyperbolic(StabilityClass c) {
  return c != StabilityClass::NonHyperbolic && c != StabilityClass::CenterAmbiguous;
}

}  // namespace

ModelParams random_params(std::mt19937_64& rng) {
  ModelParams p;
  p.gamma = uniform(rng, 1.0, 20.0);
  p.alpha = uniform(rng, 0.0, 2.0);
  p.xi = uniform(rng, 0.0, 3.0);
  p.epsilon = std::exp(uniform(rng, std::log(0.01), std::log(1.0)));
  p.m = uniform(rng, 0.1, 2.0);
  p.delta = p.m + uniform(rng, 0.05, 5.0);
  return p;
}

double jacobian_fd_error(const ModelParams& p, State s) {
  const Matrix2 J = jacobian(p, s);
  Matrix2 fd;
  fd(0, 0) = central([&](double x) { return rhs(p, {x, s.y}).dx; }, s.x);
  fd(0, 1) = central([&](double y) { return rhs(p, {s.x, y}).dx; }, s.y);
  fd(1, 0) = central([&](double x) { return rhs(p, {x, s.y}).dy; }, s.x);
  fd(1, 1) = central([&](double y) { return rhs(p, {s.x, y}).dy; }, s.y);
  return (J - fd).cwiseAbs().maxCoeff() / std::max(1.0, J.cwiseAbs().maxCoeff());
}

double adjoint_fd_error(const ModelParams& p, State s, double pc, double qc, double u, bool quality) {
  using namespace control;
  const ControlKind k = quality ? ControlKind::Quality : ControlKind::Quantity;
  const Costate c{pc, qc};
  const Costate a = adjoint_rhs(p, s, c, u, k);
  const double fx = -central([&](double x) { return hamiltonian(p, {x, s.y}, c, u, k); }, s.x);
  const double fy = -central([&](double y) { return hamiltonian(p, {s.x, y}, c, u, k); }, s.y);
  const double scale = std::max({1.0, std::abs(a.p), std::abs(a.q)});
  return std::max(std::abs(a.p - fx), std::abs(a.q - fy)) / scale;
}

double quintic_relative_residual(const ModelParams& p, double x) {
  const auto q = interior_quintic(p);
  double scale = 0.0;
  double xp = 1.0;
  for (double c : q.c) {
    scale += std::abs(c) * xp;
    xp *= std::abs(x);
  }
  return scale > 0.0 ? std::abs(q(x)) / scale : std::abs(q(x));
}

SuiteResult positivity_boundedness(std::uint64_t seed, std::size_t runs, double envelope_tol) {
  return run_suite("positivity_boundedness", seed, runs, envelope_tol, [&](std::mt19937_64& rng, ModelParams& p) {
    p = random_params(rng);
    const State s0{uniform(rng, 1e-3, 1.5 * p.gamma), uniform(rng, 1e-3, 5.0)};
    SimulationOptions opts;
    opts.envelope_tol = envelope_tol;
    const Trajectory tr = integrate(p, s0, 100.0, opts);
    if (tr.truncated || tr.count(TrajectoryEventKind::PositivityClamp) > 0) return HUGE_VAL;
    const BoundEnvelope env = bound_envelope(p);
    const double W0 = envelope_W(p, s0);
    double excess = -HUGE_VAL;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const State s = tr.states[i];
      if (!std::isfinite(s.x) || !std::isfinite(s.y)) return HUGE_VAL;
      excess = std::max(excess, envelope_W(p, s) - env.gronwall(W0, tr.times[i] - tr.times.front()));
    }
    return std::max(excess, 0.0);
  });
}

SuiteResult jacobian_audit(std::uint64_t seed, std::size_t samples, double rel_tol) {
  return run_suite("jacobian_fd_audit", seed, samples, rel_tol, [](std::mt19937_64& rng, ModelParams& p) {
    p = random_params(rng);
    return jacobian_fd_error(p, {uniform(rng, 0.0, 1.5 * p.gamma), uniform(rng, 0.0, 5.0)});
  });
}

SuiteResult adjoint_audit(std::uint64_t seed, std::size_t samples, double rel_tol) {
  return run_suite("adjoint_fd_audit", seed, samples, rel_tol, [](std::mt19937_64& rng, ModelParams& p) {
    p = random_params(rng);
    const State s{uniform(rng, 0.0, 1.5 * p.gamma), uniform(rng, 0.0, 5.0)};
    const double pc = uniform(rng, -2.0, 2.0);
    const double qc = uniform(rng, -2.0, 2.0);
    const double u = uniform(rng, 0.0, 3.0);
    const bool quality = rng() & 1u;
    return adjoint_fd_error(p, s, pc, qc, u, quality);
  });
}

SuiteResult lemma_concordance(std::uint64_t seed, std::size_t draws) {
  return run_suite("lemma_concordance", seed, draws, 0.0, [](std::mt19937_64& rng, ModelParams& p) {
    p = random_params(rng);
    const double phi1 = predator_intercept_numerator(p);
    const double phi2 = phi1 + (p.delta - p.m) * p.gamma * p.gamma;
    double mismatches = 0.0;
    for (const auto& e : find_all_equilibria(p)) {
      if (!hyperbolic(e.stability)) continue;
      switch (e.kind) {
        case EquilibriumKind::E0:
          mismatches += e.stability != (phi1 < 0.0 ? StabilityClass::Saddle : StabilityClass::UnstableNode);
          break;
        case EquilibriumKind::E1:
          mismatches += e.stability != (phi2 < 0.0 ? StabilityClass::StableNode : StabilityClass::Saddle);
          break;
        case EquilibriumKind::E2:
          mismatches += !(phi1 > 0.0) || e.stability != StabilityClass::Saddle;
          break;
        case EquilibriumKind::Interior: break;
      }
    }
    return mismatches;
  });
}

SuiteResult interior_residuals(std::uint64_t seed, std::size_t draws, double tol) {
  return run_suite("interior_residuals", seed, draws, tol, [](std::mt19937_64& rng, ModelParams& p) {
    p = random_params(rng);
    double worst = 0.0;
    for (const auto& e : find_interior_equilibria(p)) {
      const StateDerivative d = rhs(p, e.location);
      worst = std::max({worst, std::abs(d.dx), std::abs(d.dy), quintic_relative_residual(p, e.location.x)});
    }
    return worst;
  });
}

std::vector<SuiteResult> run_all(std::uint64_t seed) {
  return {positivity_boundedness(seed), jacobian_audit(seed + 1), adjoint_audit(seed + 2),
          lemma_concordance(seed + 3), interior_residuals(seed + 4)};
}

double quintic_resultant(const ModelParams& p) {
  const auto q = interior_quintic(p);
  double scale = 0.0;
  for (double c : q.c) scale = std::max(scale, std::abs(c));
  if (!(scale > 0.0)) return 0.0;
  // Highest degree first.
  double a[6], b[5];
  for (int i = 0; i < 6; ++i) a[i] = q.c[5 - i] / scale;
  for (int i = 0; i < 5; ++i) b[i] = (5 - i) * q.c[5 - i] / scale;
  Eigen::Matrix<double, 9, 9> S = Eigen::Matrix<double, 9, 9>::Zero();
  for (int r = 0; r < 4; ++r) {
    for (int i = 0; i < 6; ++i) S(r, r + i) = a[i];
  }
  for (int r = 0; r < 5; ++r) {
    for (int i = 0; i < 5; ++i) S(4 + r, r + i) = b[i];
  }
  return S.partialPivLu().determinant();
}

std::vector<FoldOracle> resultant_folds(const ModelParams& p, Param which, double lo, double hi, std::size_t n,
                                        double tol) {
  if (!(hi > lo) || n < 2) throw DomainError("resultant scan needs lo < hi and n >= 2");
  auto R = [&](double v) { return quintic_resultant(with(p, which, v)); };
  std::vector<FoldOracle> out;
  double a = lo;
  double ra = R(a);
  for (std::size_t i = 1; i < n; ++i) {
    const double b = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double rb = R(b);
    if ((ra < 0.0) != (rb < 0.0)) {
      double l = a, h = b, rl = ra;
      while (h - l > tol) {
        const double mid = 0.5 * (l + h);
        const double rm = R(mid);
        if ((rm < 0.0) == (rl < 0.0)) {
          l = mid;
          rl = rm;
        } else {
          h = mid;
        }
      }
      const double v = 0.5 * (l + h);
      const ModelParams pv = with(p, which, v);
      const auto q = interior_quintic(pv);
      const auto roots = poly::roots(q.c);
      // The colliding pair: the two closest roots.
      double best = HUGE_VAL, x = 0.0;
      for (std::size_t s = 0; s < roots.size(); ++s) {
        for (std::size_t t = s + 1; t < roots.size(); ++t) {
          const double d = std::abs(roots[s] - roots[t]);
          if (d < best) {
            best = d;
            x = 0.5 * (roots[s].real() + roots[t].real());
          }
        }
      }
      if (x > 0.0 && x < pv.gamma && interior_y(pv, x) > 0.0) out.push_back({v, x});
    }
    a = b;
    ra = rb;
  }
  return out;
}

}  // namespace afpp::checks
