#include "afpp/equilibria.hpp"

#include <Eigen/LU>
#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace afpp;

namespace {

const ModelParams kTc{1.0, 1.0, 2.0, 0.5, 6.0, 8.0};
const ModelParams kScurve{15.0, 0.1, 1.0, 0.01, 0.258, 0.3};

std::size_t count_kind(const std::vector<Equilibrium>& es, EquilibriumKind k) {
  return std::count_if(es.begin(), es.end(), [&](const Equilibrium& e) { return e.kind == k; });
}

}  // namespace

TEST_CASE("quintic coefficients of the transcritical example") {
  const auto q = interior_quintic(kTc);
  const double expected[6] = {-4.5, 2.5, -3.0, 5.0, -0.5, 0.5};
  for (int i = 0; i < 6; ++i) CHECK(q.c[i] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("quintic is the weighted nullcline gap") {
  for (const ModelParams& p : {kTc, kScurve, ModelParams{7.0, 0.4, 0.3, 0.2, 1.0, 3.0}}) {
    for (double x : {0.3 * p.gamma, 0.8 * p.gamma, p.gamma}) {
      const double load = p.food_load() + x * x;
      const double gap = prey_nullcline_y(p, x) - predator_nullcline_y(p, x);
      CHECK(interior_quintic(p)(x) == doctest::Approx(-p.epsilon * x * load * gap).epsilon(1e-12));
    }
  }
}

TEST_CASE("three interior equilibria only inside the fold window") {
  CHECK(find_interior_equilibria(kScurve).size() == 1);
  CHECK(find_interior_equilibria(with(kScurve, Param::Epsilon, 0.0108)).size() == 1);
  CHECK(find_interior_equilibria(with(kScurve, Param::Epsilon, 0.0109)).size() == 3);
  CHECK(find_interior_equilibria(with(kScurve, Param::Epsilon, 0.0165)).size() == 3);
  CHECK(find_interior_equilibria(with(kScurve, Param::Epsilon, 0.0166)).size() == 1);
}

TEST_CASE("interior equilibria sit on both nullclines") {
  const ModelParams p = with(kScurve, Param::Epsilon, 0.013);
  const auto es = find_interior_equilibria(p);
  REQUIRE(es.size() == 3);
  for (const auto& e : es) {
    CHECK(std::abs(prey_nullcline_y(p, e.location.x) - predator_nullcline_y(p, e.location.x)) < 1e-8);
    const auto d = rhs(p, e.location);
    CHECK(std::abs(d.dx) < 1e-9);
    CHECK(std::abs(d.dy) < 1e-9);
    CHECK(e.location.y == doctest::Approx(interior_y(p, e.location.x)));
  }
  CHECK(std::is_sorted(es.begin(), es.end(), [](auto& a, auto& b) { return a.location.x < b.location.x; }));
}

TEST_CASE("interior point meets E1 at the transcritical value") {
  for (double xi : {1.5, 1.9, 1.999}) CHECK(find_interior_equilibria(with(kTc, Param::Xi, xi)).empty());
  double prev = 0.0;
  for (double xi : {2.1, 2.01, 2.001}) {
    const auto es = find_interior_equilibria(with(kTc, Param::Xi, xi));
    REQUIRE(es.size() == 1);
    CHECK(es[0].location.x > prev);
    prev = es[0].location.x;
  }
  CHECK(prev == doctest::Approx(kTc.gamma).epsilon(1e-3));
}

TEST_CASE("E2 closed form") {
  ModelParams p = kTc;
  p.xi = 4.0;
  p.alpha = 1.0;
  // phi1 = 8*4 - 6*5 = 2, alpha xi = 4.
  const auto e2 = prey_free_equilibrium(p);
  REQUIRE(e2);
  CHECK(e2->x == 0.0);
  CHECK(e2->y == doctest::Approx(0.8));
  CHECK(std::abs(rhs(p, *e2).dy) < 1e-14);
  CHECK_FALSE(prey_free_equilibrium(with(kTc, Param::Xi, 0.0)));
}

TEST_CASE("E0 and E1 are always present") {
  for (const ModelParams& p : {kTc, kScurve, with(kScurve, Param::Xi, 0.0)}) {
    const auto es = find_all_equilibria(p);
    CHECK(count_kind(es, EquilibriumKind::E0) == 1);
    CHECK(count_kind(es, EquilibriumKind::E1) == 1);
  }
  CHECK(count_kind(find_all_equilibria(with(kTc, Param::Xi, 0.0)), EquilibriumKind::E2) == 0);
}

TEST_CASE("axial classes follow the closed-form signs") {
  SUBCASE("E0 saddle when phi1 < 0") {
    const auto es = find_all_equilibria(with(kTc, Param::Xi, 1.0));
    CHECK(es[0].kind == EquilibriumKind::E0);
    CHECK(es[0].stability == StabilityClass::Saddle);
  }
  SUBCASE("E1 stable node when phi2 < 0") {
    ModelParams p = kTc;
    p.xi = 0.5;
    const auto es = find_all_equilibria(p);
    CHECK(es[1].flags.phi2 < 0.0);
    CHECK(es[1].stability == StabilityClass::StableNode);
  }
  SUBCASE("E2 saddle") {
    const auto es = find_all_equilibria(with(kTc, Param::Xi, 4.0));
    const auto it = std::find_if(es.begin(), es.end(), [](auto& e) { return e.kind == EquilibriumKind::E2; });
    REQUIRE(it != es.end());
    CHECK(it->stability == StabilityClass::Saddle);
  }
}

TEST_CASE("E1 eigenvalue vanishes at xi = 2") {
  const auto es = find_all_equilibria(kTc);
  CHECK(es[1].kind == EquilibriumKind::E1);
  CHECK(std::abs(es[1].eigenvalues[1].real()) < 1e-12);
  CHECK(es[1].stability == StabilityClass::NonHyperbolic);
}

TEST_CASE("eigenvalue classification") {
  CHECK(classify_eigenvalues({{{-1, 0}, {-2, 0}}}) == StabilityClass::StableNode);
  CHECK(classify_eigenvalues({{{-1, 2}, {-1, -2}}}) == StabilityClass::StableFocus);
  CHECK(classify_eigenvalues({{{1, 0}, {2, 0}}}) == StabilityClass::UnstableNode);
  CHECK(classify_eigenvalues({{{1, 2}, {1, -2}}}) == StabilityClass::UnstableFocus);
  CHECK(classify_eigenvalues({{{-1, 0}, {2, 0}}}) == StabilityClass::Saddle);
  CHECK(classify_eigenvalues({{{0, 1}, {0, -1}}}) == StabilityClass::CenterAmbiguous);
  CHECK(classify_eigenvalues({{{-1, 0}, {0, 0}}}) == StabilityClass::NonHyperbolic);
  Matrix2 J;
  J << 0, 1, -4, 0;
  const auto ev = eigenvalues(J);
  CHECK(std::abs(ev[0].imag()) == doctest::Approx(2.0));
}

TEST_CASE("closed-form determinant and trace") {
  for (const auto& e : find_interior_equilibria(kScurve)) {
    const Matrix2 J = jacobian(kScurve, e.location);
    CHECK(interior_determinant_closed_form(kScurve, e.location) ==
          doctest::Approx(J.determinant()).epsilon(1e-9));
    CHECK(interior_trace_closed_form(kScurve, e.location) == doctest::Approx(J.trace()).epsilon(1e-9));
  }
}

TEST_CASE("prey floor arithmetic") {
  CHECK(prey_floor(kTc) == doctest::Approx(1.0 / 3.0));
}
