#include "afpp/global_dynamics.hpp"

#include <doctest.h>

#include <cmath>

using namespace afpp;

namespace {
const ModelParams kR1{1.0, 1.0, 0.0, 0.5, 6.0, 8.0};
const ModelParams kR2{1.0, 0.1, 0.0, 0.03, 0.1, 0.6};
const ModelParams kR3{15.0, 0.1, 0.0, 0.01, 0.258, 0.3};
}

TEST_CASE("phi values") {
  const auto phi = phi_values({1.0, 1.0, 2.0, 0.5, 6.0, 8.0});
  CHECK(phi.phi1 == doctest::Approx(-2.0));
  CHECK(phi.phi2 == doctest::Approx(0.0));
  CHECK(phi.phi3 == doctest::Approx(1.0));
}

TEST_CASE("subregion index") {
  CHECK(subregion_index({1, 1, -1}) == 1);
  CHECK(subregion_index({1, 1, 1}) == 2);
  CHECK(subregion_index({-1, 1, 1}) == 3);
  CHECK(subregion_index({-1, 1, -1}) == 4);
  CHECK(subregion_index({-1, -1, 1}) == 5);
}

TEST_CASE("base regions") {
  CHECK(classify_base_region(kR1) == BaseRegion::R1);
  CHECK(classify_base_region(kR2) == BaseRegion::R2);
  CHECK(classify_base_region(kR3) == BaseRegion::R3);
  CHECK_THROWS_AS(classify_base_region(with(kR1, Param::Xi, 0.1)), DomainError);
}

TEST_CASE("Hopf parameters without food have an interior focus") {
  const ModelParams p{15.0, 0.1, 0.0, 0.045, 0.28, 0.45};
  bool focus = false;
  for (const auto& e : find_interior_equilibria(p)) focus = focus || std::abs(e.eigenvalues[0].imag()) > 0.0;
  CHECK(focus);
}

TEST_CASE("log grid") {
  const auto g = log_grid(0.01, 100.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(0.01));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(100.0));
}

TEST_CASE("atlas cells agree with the closed-form signs") {
  const auto at = atlas(kR2, log_grid(0.01, 100.0, 25), log_grid(0.01, 100.0, 25), 2);
  CHECK(at.cells.size() == 625);
  for (const auto& c : at.cells) {
    CHECK(c.flags.error.empty());
    if (c.phi.phi1 > 0.0) {
      CHECK(c.flags.e2_exists);
      REQUIRE(c.flags.e2);
      CHECK(*c.flags.e2 == StabilityClass::Saddle);
    }
    if (c.phi.phi2 < -1e-12) CHECK(is_stable(c.flags.e1));
    CHECK(c.flags.bistable == (is_stable(c.flags.e1) && c.flags.stable_interior_count > 0));
    CHECK(c.subregion.rfind("A2", 0) == 0);
  }
  const auto rep = consequences_report(at);
  CHECK(rep.stable_e2_cells == 0);
  CHECK(rep.floor == doctest::Approx(kR2.epsilon / (1.0 + kR2.epsilon / kR2.gamma)));
}

TEST_CASE("atlas does not depend on the thread count") {
  const auto g = log_grid(0.05, 20.0, 12);
  const auto a = atlas(kR3, g, g, 1);
  const auto b = atlas(kR3, g, g, 5);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].subregion == b.cells[i].subregion);
    CHECK(a.cells[i].flags.interior_count == b.cells[i].flags.interior_count);
  }
}

TEST_CASE("floor value") {
  const auto at = atlas({1.0, 1.0, 0.0, 0.5, 6.0, 8.0}, {1.0}, {1.0}, 1);
  CHECK(consequences_report(at).floor == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(atlas(kR1, {}, {1.0}), DomainError);
  CHECK_THROWS_AS(atlas(kR1, {2.0, 1.0}, {1.0}), DomainError);
}
