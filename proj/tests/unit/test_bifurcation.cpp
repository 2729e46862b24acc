#include "afpp/bifurcation.hpp"
#include "afpp/checks.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace afpp;

namespace {

const ModelParams kTc{1.0, 1.0, 2.0, 0.5, 6.0, 8.0};
const ModelParams kScurve{15.0, 0.1, 1.0, 0.01, 0.258, 0.3};
const ModelParams kHopf{15.0, 0.1, 0.45, 0.04, 0.28, 0.45};

std::vector<BifurcationEvent> all_events(const std::vector<ContinuationResult>& bs, BifurcationKind k) {
  std::vector<BifurcationEvent> out;
  for (const auto& b : bs) {
    for (const auto& e : b.events) {
      if (e.kind == k) out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.param_value < b.param_value; });
  return out;
}

}  // namespace

TEST_CASE("transcritical critical value") {
  const auto c = transcritical_xi_critical(kTc);
  CHECK(c.xi_star == 2.0);
  CHECK(c.bracket_lo <= 2.0);
  CHECK(c.bracket_hi >= 2.0);
  CHECK(c.bracket_hi - c.bracket_lo <= 1e-8);
  CHECK(c.location.x == kTc.gamma);
  CHECK(std::abs(c.eigenvalues[1].real()) < 1e-12);
  CHECK(c.sotomayor.transcritical_conditions);
}

TEST_CASE("saddle-node critical value") {
  const auto c = saddlenode_xi_critical(kTc);
  CHECK(c.xi_star == 3.0);
  CHECK(c.bracket_hi - c.bracket_lo <= 1e-8);
  CHECK_FALSE(prey_free_equilibrium(with(kTc, Param::Xi, 2.999)));
  CHECK(prey_free_equilibrium(with(kTc, Param::Xi, 3.001)));
}

TEST_CASE("degenerate parameters are rejected") {
  ModelParams p = kTc;
  p.alpha = p.delta / p.m;
  CHECK_THROWS_AS(transcritical_xi_critical(p), DomainError);
  CHECK_THROWS_AS(saddlenode_xi_critical(p), DomainError);
}

TEST_CASE("S-curve has two folds matching the resultant oracle") {
  const auto bs = continue_all_branches(kScurve, Param::Epsilon, {0.002, 0.02});
  const auto folds = all_events(bs, BifurcationKind::Fold);
  REQUIRE(folds.size() == 2);
  const auto oracle = checks::resultant_folds(kScurve, Param::Epsilon, 0.002, 0.02);
  REQUIRE(oracle.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(folds[i].param_value - oracle[i].value) < 1e-6);
    CHECK(std::abs(folds[i].location.x - oracle[i].x) < 1e-3);
  }
  CHECK(all_events(bs, BifurcationKind::FocusNodeTransition).size() >= 2);
  // Three equilibria strictly between the folds.
  const double mid = 0.5 * (folds[0].param_value + folds[1].param_value);
  CHECK(find_interior_equilibria(with(kScurve, Param::Epsilon, mid)).size() == 3);
}

TEST_CASE("monotone branch has no folds") {
  const auto bs = continue_all_branches(kTc, Param::Xi, {2.1, 2.9});
  CHECK(all_events(bs, BifurcationKind::Fold).empty());
  for (double xi = 2.1; xi < 2.9; xi += 0.004) {
    CHECK(find_interior_equilibria(with(kTc, Param::Xi, xi)).size() == 1);
  }
}

TEST_CASE("branch points are equilibria") {
  const auto bs = continue_all_branches(kScurve, Param::Epsilon, {0.002, 0.02});
  for (const auto& b : bs) {
    for (std::size_t i = 0; i < b.points.size(); i += 17) {
      const auto& pt = b.points[i];
      const auto d = rhs(with(kScurve, Param::Epsilon, pt.param_value), pt.equilibrium.location);
      CHECK(std::abs(d.dx) < 1e-9);
      CHECK(std::abs(d.dy) < 1e-9);
    }
  }
}

TEST_CASE("Hopf crossing on the lower branch") {
  const auto ev = detect_hopf(kHopf, Param::Epsilon, {0.02, 0.045});
  REQUIRE_FALSE(ev.empty());
  for (const auto& e : ev) {
    CHECK(std::abs(e.eigenvalues[0].real()) < 1e-6);
    CHECK(std::abs(e.eigenvalues[0].imag()) > 0.0);
    CHECK(e.bracket_hi - e.bracket_lo <= 1e-8);
  }
}

TEST_CASE("zero-amplitude sweep encloses no area") {
  const auto r = hysteresis_sweep(kScurve, 0.01, 0.01, 1000.0, 2, {15.0, 0.5}, {}, 2000);
  CHECK(std::abs(r.loop_area_proxy) < 1e-9);
}

TEST_CASE("slow sweep jumps near the folds") {
  const auto r = hysteresis_sweep(kScurve, 0.002, 0.02, 50000.0, 2, {15.0, 0.5});
  CHECK(r.loop_area_proxy > 0.0);
  REQUIRE(r.jumps.size() == 2);
  const auto oracle = checks::resultant_folds(kScurve, Param::Epsilon, 0.002, 0.02);
  REQUIRE(oracle.size() == 2);
  for (const auto& j : r.jumps) {
    const double fold = j.upward ? oracle[1].value : oracle[0].value;
    CHECK(std::abs(j.eps - fold) <= 0.05 * fold);
  }
}

TEST_CASE("sweep argument checks") {
  CHECK_THROWS_AS(hysteresis_sweep(kScurve, 0.0, 0.02, 100.0, 1, {1, 1}), DomainError);
  CHECK_THROWS_AS(hysteresis_sweep(kScurve, 0.02, 0.01, 100.0, 1, {1, 1}), DomainError);
  CHECK_THROWS_AS(hysteresis_sweep(kScurve, 0.01, 0.02, 100.0, 0, {1, 1}), DomainError);
}
