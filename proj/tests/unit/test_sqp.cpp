#include "afpp/sqp.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace afpp::nlp;

TEST_CASE("box QP with an active bound") {
  Matrix H = Matrix::Identity(2, 2);
  Vector g(2);
  g << -2.0, -2.0;
  Matrix A(1, 2);
  A << 1.0, -1.0;
  Vector b(1);
  b << 0.0;
  Vector lo = Vector::Constant(2, -10.0);
  Vector hi = Vector::Constant(2, 0.5);
  const auto r = solve_box_qp(H, g, A, b, lo, hi);
  REQUIRE(r.converged);
  CHECK(r.d[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.d[1] == doctest::Approx(0.5).epsilon(1e-8));
  const Vector stat = H * r.d + g - A.transpose() * r.y - r.z_lower + r.z_upper;
  CHECK(stat.norm() < 1e-8);
}

TEST_CASE("Hock-Schittkowski 71") {
  // x1..x4 in [1, 5], slack s = x1 x2 x3 x4 >= 25, sum of squares = 40.
  Problem p;
  p.lower = Vector::Constant(5, 1.0);
  p.upper = Vector::Constant(5, 5.0);
  p.lower[4] = 25.0;
  p.upper[4] = std::numeric_limits<double>::infinity();
  p.evaluate = [](const Vector& x, Evaluation& e) {
    e.f = x[0] * x[3] * (x[0] + x[1] + x[2]) + x[2];
    e.grad = Vector::Zero(5);
    e.grad[0] = x[3] * (2 * x[0] + x[1] + x[2]);
    e.grad[1] = x[0] * x[3];
    e.grad[2] = x[0] * x[3] + 1.0;
    e.grad[3] = x[0] * (x[0] + x[1] + x[2]);
    e.c.resize(2);
    e.c[0] = x[0] * x[1] * x[2] * x[3] - x[4];
    e.c[1] = x.head<4>().squaredNorm() - 40.0;
    e.jac = Matrix::Zero(2, 5);
    e.jac(0, 0) = x[1] * x[2] * x[3];
    e.jac(0, 1) = x[0] * x[2] * x[3];
    e.jac(0, 2) = x[0] * x[1] * x[3];
    e.jac(0, 3) = x[0] * x[1] * x[2];
    e.jac(0, 4) = -1.0;
    for (int i = 0; i < 4; ++i) e.jac(1, i) = 2.0 * x[i];
  };
  Vector x0(5);
  x0 << 1.0, 5.0, 5.0, 1.0, 25.0;
  const auto r = solve_sqp(p, x0);
  CHECK(r.status == Status::Converged);
  CHECK(r.objective == doctest::Approx(17.0140173).epsilon(1e-7));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(4.7429994).epsilon(1e-6));
  CHECK(r.x[2] == doctest::Approx(3.8211503).epsilon(1e-6));
  CHECK(r.x[3] == doctest::Approx(1.3794082).epsilon(1e-6));
  CHECK(r.constraint_violation < 1e-8);
}

TEST_CASE("Rosenbrock with a supplied Hessian") {
  Problem p;
  p.lower = Vector::Constant(2, -5.0);
  p.upper = Vector::Constant(2, 5.0);
  p.evaluate = [](const Vector& x, Evaluation& e) {
    e.f = 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    e.grad.resize(2);
    e.grad[0] = -400 * x[0] * (x[1] - x[0] * x[0]) - 2 * (1 - x[0]);
    e.grad[1] = 200 * (x[1] - x[0] * x[0]);
    e.c.resize(0);
    e.jac.resize(0, 2);
  };
  p.hessian = [](const Vector& x, const Vector&, Matrix& h) {
    h.resize(2, 2);
    h << 1200 * x[0] * x[0] - 400 * x[1] + 2, -400 * x[0], -400 * x[0], 200;
  };
  Vector x0(2);
  x0 << -1.2, 1.0;
  const auto r = solve_sqp(p, x0);
  CHECK(r.status == Status::Converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}
