#include "afpp/polynomial.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace afpp;

TEST_CASE("roots one through ten") {
  // Constant-first coefficients of (x-1)(x-2)...(x-10).
  std::vector<double> c{1.0};
  for (int r = 1; r <= 10; ++r) {
    std::vector<double> n(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      n[i] -= r * c[i];
      n[i + 1] += c[i];
    }
    c = n;
  }
  auto z = poly::roots(c);
  REQUIRE(z.size() == 10);
  std::sort(z.begin(), z.end(), [](auto a, auto b) { return a.real() < b.real(); });
  for (int r = 1; r <= 10; ++r) {
    CHECK(z[r - 1].real() == doctest::Approx(r).epsilon(1e-8));
    CHECK(std::abs(z[r - 1].imag()) < 1e-6);
  }
}

TEST_CASE("complex pair") {
  const std::vector<double> c{1.0, 0.0, 1.0};
  const auto z = poly::roots(c);
  REQUIRE(z.size() == 2);
  for (auto r : z) {
    CHECK(std::abs(r.real()) < 1e-14);
    CHECK(std::abs(std::abs(r.imag()) - 1.0) < 1e-14);
  }
}

TEST_CASE("evaluate and derivative") {
  const std::vector<double> c{-4.5, 2.5, -3.0, 5.0, -0.5, 0.5};
  CHECK(poly::evaluate(c, 2.0) == doctest::Approx(-4.5 + 5.0 - 12.0 + 40.0 - 8.0 + 16.0));
  const auto d = poly::derivative(c);
  REQUIRE(d.size() == 5);
  CHECK(d[0] == 2.5);
  CHECK(d[4] == 2.5);
  const auto v = poly::evaluate(c, std::complex<double>(0.0, 1.0));
  CHECK(v.real() == doctest::Approx(-4.5 + 3.0 - 0.5));
  CHECK(v.imag() == doctest::Approx(2.5 - 5.0 + 0.5));
}

TEST_CASE("real polish improves a rough root") {
  const std::vector<double> c{-2.0, 0.0, 1.0};
  const auto r = poly::polish_real_root(c, 1.3);
  CHECK(r.converged);
  CHECK(r.root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r.residual < 1e-14);
}
