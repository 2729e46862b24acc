#include "afpp/equilibria.hpp"

#include "afpp/polynomial.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace afpp {

std::string_view to_string(StabilityClass c) noexcept {
  switch (c) {
    case StabilityClass::StableNode: return "StableNode";
    case StabilityClass::StableFocus: return "StableFocus";
    case StabilityClass::UnstableNode: return "UnstableNode";
    case StabilityClass::UnstableFocus: return "UnstableFocus";
    case StabilityClass::Saddle: return "Saddle";
    case StabilityClass::CenterAmbiguous: return "CenterAmbiguous";
    case StabilityClass::NonHyperbolic: return "NonHyperbolic";
  }
  return "?";
}

bool is_stable(StabilityClass c) noexcept {
  return c == StabilityClass::StableNode || c == StabilityClass::StableFocus;
}

std::string_view to_string(EquilibriumKind k) noexcept {
  switch (k) {
    case EquilibriumKind::E0: return "E0";
    case EquilibriumKind::E1: return "E1";
    case EquilibriumKind::E2: return "E2";
    case EquilibriumKind::Interior: return "Interior";
  }
  return "?";
}

double QuinticCoefficients::operator()(double x) const noexcept { return poly::evaluate(c, x); }

QuinticCoefficients interior_quintic(const ModelParams& p) noexcept {
  const double L = p.food_load();
  const double e = p.epsilon;
  const double g = p.gamma;
  QuinticCoefficients q;
  q.c[5] = e / g;
  q.c[4] = -e;
  q.c[3] = p.delta - p.m + 2.0 * e * L / g;
  q.c[2] = -2.0 * e * L;
  q.c[1] = e * L * L / g + predator_intercept_numerator(p);
  q.c[0] = -e * L * L;
  return q;
}

EigenPair eigenvalues(const Matrix2& J) noexcept {
  const double tr = J.trace();
  const double det = J.determinant();
  const double half = 0.5 * tr;
  const double disc = half * half - det;
  if (disc >= 0.0) {
    // Avoid cancellation: compute the larger-magnitude root first.
    const double root = std::sqrt(disc);
    const double big = half >= 0.0 ? half + root : half - root;
    const double small = big != 0.0 ? det / big : 0.0;
    return {std::complex<double>(std::min(big, small)), std::complex<double>(std::max(big, small))};
  }
  const double im = std::sqrt(-disc);
  return {std::complex<double>(half, -im), std::complex<double>(half, im)};
}

StabilityClass classify_eigenvalues(const EigenPair& ev, const ClassifyTolerances& tol) noexcept {
  const double radius = std::max(std::abs(ev[0]), std::abs(ev[1]));
  const bool complex = std::abs(ev[1].imag()) > tol.focus_relative * radius;
  const double re0 = ev[0].real();
  const double re1 = ev[1].real();
  if (complex) {
    if (std::abs(re0) <= tol.hyperbolic) return StabilityClass::CenterAmbiguous;
    return re0 < 0.0 ? StabilityClass::StableFocus : StabilityClass::UnstableFocus;
  }
  if (std::abs(re0) <= tol.hyperbolic || std::abs(re1) <= tol.hyperbolic) {
    return StabilityClass::NonHyperbolic;
  }
  if (re0 < 0.0 && re1 < 0.0) return StabilityClass::StableNode;
  if (re0 > 0.0 && re1 > 0.0) return StabilityClass::UnstableNode;
  return StabilityClass::Saddle;
}

double interior_y(const ModelParams& p, double x) noexcept {
  const double x2 = x * x;
  return ((p.delta - p.m) * x2 + predator_intercept_numerator(p)) /
         (p.epsilon * (1.0 + x2 + p.alpha * p.xi));
}

double prey_floor(const ModelParams& p) noexcept { return p.epsilon / (1.0 + p.epsilon / p.gamma); }

double interior_determinant_closed_form(const ModelParams& p, State s) noexcept {
  const double x = s.x;
  const double y = s.y;
  const double L = p.food_load();
  const double den = L + x * x;
  return 2.0 * p.delta * x * x * x * y * (L - p.xi) / (den * den * den) +
         p.epsilon * x * y * (1.0 / p.gamma + (L - x * x) * y / (den * den));
}

double interior_trace_closed_form(const ModelParams& p, State s) noexcept {
  const double x = s.x;
  const double y = s.y;
  const double L = p.food_load();
  const double den = L + x * x;
  return -p.epsilon * y - x / p.gamma + x * y * (x * x - L) / (den * den);
}

std::optional<State> prey_free_equilibrium(const ModelParams& p) noexcept {
  const double phi1 = predator_intercept_numerator(p);
  if (!(phi1 > 0.0)) return std::nullopt;
  return State{0.0, phi1 / (p.epsilon * p.food_load())};
}

Equilibrium classify(const ModelParams& p, Equilibrium e, const ClassifyTolerances& tol) {
  e.eigenvalues = eigenvalues(jacobian(p, e.location));
  e.stability = classify_eigenvalues(e.eigenvalues, tol);

  ClosedFormFlags& f = e.flags;
  f.phi1 = predator_intercept_numerator(p);
  f.phi2 = f.phi1 + (p.delta - p.m) * p.gamma * p.gamma;
  f.phi3 = p.food_load() - p.xi;
  if (e.kind == EquilibriumKind::Interior) {
    const double x = e.location.x;
    f.x_squared_below_load = x * x < p.food_load();
    f.above_floor = x > prey_floor(p);
    f.sufficient_stability =
        f.phi3 > 0.0 && f.above_floor && x < std::min(std::sqrt(p.food_load()), p.gamma);
  }
  return e;
}

std::vector<Equilibrium> find_interior_equilibria(const ModelParams& p, const ClassifyTolerances& tol) {
  const auto q = interior_quintic(p);
  std::vector<Equilibrium> out;
  for (const auto& z : poly::roots(q.c)) {
    if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z))) continue;
    // Loose pre-filter; the polished root is filtered exactly below.
    if (z.real() <= -1e-6 * p.gamma || z.real() >= p.gamma * (1.0 + 1e-6)) continue;
    const auto polished = poly::polish_real_root(q.c, z.real());
    if (!polished.converged) {
      std::ostringstream msg;
      msg << "interior root polishing failed near x=" << z.real() << " (residual "
          << polished.residual << ")";
      throw RootPolishError(msg.str(), z.real());
    }
    const double x = polished.root;
    if (!(x > 0.0 && x < p.gamma)) continue;
    const double y = interior_y(p, x);
    if (!(y > 0.0)) continue;
    // Nearly coincident roots polish onto the same value.
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Equilibrium& e) {
      return std::abs(e.location.x - x) <= 1e-12 * (1.0 + x);
    });
    if (duplicate) continue;
    Equilibrium e;
    e.location = {x, y};
    e.kind = EquilibriumKind::Interior;
    out.push_back(classify(p, e, tol));
  }
  std::sort(out.begin(), out.end(),
            [](const Equilibrium& a, const Equilibrium& b) { return a.location.x < b.location.x; });
  return out;
}

std::vector<Equilibrium> find_all_equilibria(const ModelParams& p, const ClassifyTolerances& tol) {
  auto axial = [&](State s, EquilibriumKind k) {
    Equilibrium e;
    e.location = s;
    e.kind = k;
    return classify(p, e, tol);
  };
  std::vector<Equilibrium> out;
  out.push_back(axial({0.0, 0.0}, EquilibriumKind::E0));
  out.push_back(axial({p.gamma, 0.0}, EquilibriumKind::E1));
  if (auto e2 = prey_free_equilibrium(p)) out.push_back(axial(*e2, EquilibriumKind::E2));
  for (auto& e : find_interior_equilibria(p, tol)) out.push_back(std::move(e));
  return out;
}

}  // namespace afpp
