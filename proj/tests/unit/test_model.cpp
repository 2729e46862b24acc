#include "afpp/error.hpp"
#include "afpp/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace afpp;

namespace {
const ModelParams kTc{1.0, 1.0, 2.0, 0.5, 6.0, 8.0};
}

TEST_CASE("nondimensionalize identity scaling") {
  const ModelParams p = nondimensionalize(DimensionalParams{});
  CHECK(p.gamma == 1.0);
  CHECK(p.alpha == 1.0);
  CHECK(p.xi == 1.0);
  CHECK(p.epsilon == 1.0);
  CHECK(p.m == 1.0);
  CHECK(p.delta == 1.0);
}

TEST_CASE("nondimensionalize without additional food") {
  DimensionalParams d;
  d.A = 0.0;
  d.eta = 7.0;
  CHECK(nondimensionalize(d).xi == 0.0);
}

TEST_CASE("nondimensionalize worked example") {
  DimensionalParams d;
  d.r = 2;
  d.K = 10;
  d.a = 2;
  d.eta = 1;
  d.A = 4;
  d.d = 1;
  d.c = 4;
  d.m1 = 1;
  d.delta1 = 3;
  d.alpha = 0.5;
  const ModelParams p = nondimensionalize(d);
  CHECK(p.gamma == doctest::Approx(5.0));
  CHECK(p.alpha == doctest::Approx(0.5));
  CHECK(p.epsilon == doctest::Approx(0.5));
  CHECK(p.m == doctest::Approx(0.5));
  CHECK(p.delta == doctest::Approx(1.5));
}

TEST_CASE("nondimensional field matches the rescaled dimensional field") {
  DimensionalParams d;
  d.r = 2;
  d.K = 10;
  d.a = 2;
  d.eta = 1.3;
  d.A = 4;
  d.d = 0.7;
  d.c = 4;
  d.m1 = 1;
  d.delta1 = 3;
  d.alpha = 0.5;
  const ModelParams p = nondimensionalize(d);
  // N = a x, P = a r y / c, T = t / r.
  const double x = 1.7, y = 0.9;
  const auto nd = rhs(p, {x, y});
  const auto dim = dimensional_rhs(d, d.a * x, d.a * d.r * y / d.c);
  CHECK(dim.dx == doctest::Approx(d.a * d.r * nd.dx).epsilon(1e-12));
  CHECK(dim.dy == doctest::Approx(d.a * d.r * d.r * nd.dy / d.c).epsilon(1e-12));
}

TEST_CASE("validation") {
  CHECK_NOTHROW(kTc.validate());
  ModelParams p = kTc;
  p.gamma = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = kTc;
  p.xi = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = kTc;
  p.delta = 5.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_NOTHROW(p.validate({true}));
  p.alpha = 0.0;
  p.xi = 0.0;
  CHECK_NOTHROW(p.validate({true}));
  DimensionalParams d;
  d.c = -1.0;
  CHECK_THROWS_AS(d.validate(), DomainError);
}

TEST_CASE("param names round-trip") {
  for (Param q : {Param::Gamma, Param::Alpha, Param::Xi, Param::Epsilon, Param::M, Param::Delta}) {
    CHECK(param_from_string(to_string(q)) == q);
    CHECK(get(with(kTc, q, 3.25), q) == 3.25);
  }
  CHECK_THROWS_AS(param_from_string("zeta"), DomainError);
}

TEST_CASE("axial points are stationary") {
  const auto o = rhs(kTc, {0.0, 0.0});
  CHECK(o.dx == 0.0);
  CHECK(o.dy == 0.0);
  const auto g = rhs(kTc, {kTc.gamma, 0.0});
  CHECK(g.dx == 0.0);
  CHECK(g.dy == 0.0);
}

TEST_CASE("predator on the y axis") {
  const double y = 0.8;
  const auto d = rhs(kTc, {0.0, y});
  const double load = kTc.food_load();
  CHECK(d.dx == 0.0);
  CHECK(d.dy == doctest::Approx((kTc.delta * kTc.xi / load - kTc.m - kTc.epsilon * y) * y));
  const double y2 = (kTc.delta * kTc.xi - kTc.m * load) / (kTc.epsilon * load);
  CHECK(std::abs(rhs(kTc, {0.0, y2}).dy) < 1e-14);
}

TEST_CASE("nullclines zero the matching component") {
  const ModelParams p{15.0, 0.1, 0.45, 0.04, 0.28, 0.45};
  for (double x = 0.25; x < p.gamma; x += 0.75) {
    CHECK(std::abs(rhs(p, {x, prey_nullcline_y(p, x)}).dx) < 1e-12);
    const double yp = predator_nullcline_y(p, x);
    if (yp > 0.0) CHECK(std::abs(rhs(p, {x, yp}).dy) < 1e-12);
  }
  CHECK(prey_nullcline_y(p, p.gamma) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(prey_nullcline_y(p, 0.0), DomainError);
  double prev = 0.0;
  for (double x = 1e-1; x > 1e-7; x /= 10.0) {
    const double y = prey_nullcline_y(p, x);
    CHECK(y > prev);
    prev = y;
  }
}

TEST_CASE("predator nullcline intercepts") {
  CHECK(predator_nullcline_y(kTc, 0.0) ==
        doctest::Approx((kTc.delta * kTc.xi - kTc.m * kTc.food_load()) / (kTc.epsilon * kTc.food_load())));
  ModelParams p = kTc;
  p.xi = 0.0;
  CHECK(predator_nullcline_y(p, 0.0) == doctest::Approx(-p.m / p.epsilon));
}

TEST_CASE("nullcline discriminant sign") {
  ModelParams p{15.0, 0.1, 0.45, 0.04, 0.28, 0.45};
  CHECK(nullcline_discriminant(p) > 0.0);
  CHECK(nullcline_discriminant(kTc) < 0.0);
  p.gamma = 3.0 * std::sqrt(3.0 * p.food_load());
  CHECK(std::abs(nullcline_discriminant(p)) < 1e-12);
}

TEST_CASE("jacobian against central differences") {
  const ModelParams p{7.0, 0.6, 0.3, 0.2, 0.9, 2.5};
  const State s{2.3, 1.4};
  const Matrix2 J = jacobian(p, s);
  const double h = 1e-6;
  CHECK(J(0, 0) == doctest::Approx((rhs(p, {s.x + h, s.y}).dx - rhs(p, {s.x - h, s.y}).dx) / (2 * h)).epsilon(1e-7));
  CHECK(J(0, 1) == doctest::Approx((rhs(p, {s.x, s.y + h}).dx - rhs(p, {s.x, s.y - h}).dx) / (2 * h)).epsilon(1e-7));
  CHECK(J(1, 0) == doctest::Approx((rhs(p, {s.x + h, s.y}).dy - rhs(p, {s.x - h, s.y}).dy) / (2 * h)).epsilon(1e-7));
  CHECK(J(1, 1) == doctest::Approx((rhs(p, {s.x, s.y + h}).dy - rhs(p, {s.x, s.y - h}).dy) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("predator intercept numerator") {
  CHECK(predator_intercept_numerator(kTc) == doctest::Approx(-2.0));
}
