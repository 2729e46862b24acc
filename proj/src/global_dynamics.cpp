#include "afpp/global_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace afpp {

std::string_view to_string(BaseRegion r) noexcept {
  switch (r) {
    case BaseRegion::R1: return "R1";
    case BaseRegion::R2: return "R2";
    case BaseRegion::R3: return "R3";
    case BaseRegion::Unclassified: return "Unclassified";
  }
  return "?";
}

PhiValues phi_values(const ModelParams& p) noexcept {
  PhiValues v;
  v.phi1 = predator_intercept_numerator(p);
  v.phi2 = v.phi1 + (p.delta - p.m) * p.gamma * p.gamma;
  v.phi3 = p.food_load() - p.xi;
  return v;
}

int subregion_index(const PhiValues& phi) noexcept {
  if (phi.phi2 <= 0.0) return 5;
  if (phi.phi1 > 0.0) return phi.phi3 > 0.0 ? 2 : 1;
  return phi.phi3 > 0.0 ? 3 : 4;
}

std::string subregion_mapping() {
  return "A<b><k>: b = base region digit (R1/R2/R3 at xi=0, 0 if unclassified); "
         "k = 1 (phi1>0, phi3<=0), 2 (phi1>0, phi3>0), 3 (phi1<=0, phi2>0, phi3>0), "
         "4 (phi1<=0, phi2>0, phi3<=0), 5 (phi2<=0); bistable reported separately; "
         "sign-triple approximation of the region maps";
}

BaseRegion classify_base_region(const ModelParams& p_no_food, const ClassifyTolerances& tol) {
  if (p_no_food.xi != 0.0) throw DomainError("base region is defined at xi = 0");
  const auto interior = find_interior_equilibria(p_no_food, tol);
  if (interior.empty()) return BaseRegion::R1;
  if (interior.size() > 1) return BaseRegion::Unclassified;
  switch (interior.front().stability) {
    case StabilityClass::StableNode: return BaseRegion::R2;
    case StabilityClass::StableFocus: return BaseRegion::R3;
    default: return BaseRegion::Unclassified;
  }
}

RegionFlags region_flags(const ModelParams& p, const ClassifyTolerances& tol) {
  RegionFlags f;
  f.min_stable_x = std::numeric_limits<double>::quiet_NaN();
  try {
    for (const auto& e : find_all_equilibria(p, tol)) {
      switch (e.kind) {
        case EquilibriumKind::E0: f.e0 = e.stability; break;
        case EquilibriumKind::E1: f.e1 = e.stability; break;
        case EquilibriumKind::E2:
          f.e2_exists = true;
          f.e2 = e.stability;
          break;
        case EquilibriumKind::Interior:
          ++f.interior_count;
          if (is_stable(e.stability)) {
            ++f.stable_interior_count;
            if (!(f.min_stable_x <= e.location.x)) f.min_stable_x = e.location.x;
          }
          break;
      }
    }
  } catch (const Error& err) {
    f.error = err.what();
  }
  f.bistable = is_stable(f.e1) && f.stable_interior_count > 0;
  return f;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n == 0) throw DomainError("log grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = n == 1 ? lo : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

Atlas atlas(const ModelParams& p_base, const std::vector<double>& alpha_grid, const std::vector<double>& xi_grid,
            unsigned threads, const ClassifyTolerances& tol) {
  auto check_grid = [](const std::vector<double>& g, const char* name) {
    if (g.empty()) throw DomainError(std::string(name) + " grid is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] > 0.0) || (i > 0 && !(g[i] > g[i - 1]))) {
        throw DomainError(std::string(name) + " grid must be strictly positive and increasing");
      }
    }
  };
  check_grid(alpha_grid, "alpha");
  check_grid(xi_grid, "xi");

  Atlas out;
  out.base = p_base;
  out.alpha_grid = alpha_grid;
  out.xi_grid = xi_grid;
  out.base_region = classify_base_region(with(p_base, Param::Xi, 0.0), tol);
  const char digit = out.base_region == BaseRegion::Unclassified
                         ? '0'
                         : static_cast<char>('1' + static_cast<int>(out.base_region));

  const std::size_t nx = xi_grid.size();
  out.cells.resize(alpha_grid.size() * nx);
  auto fill_row = [&](std::size_t ia) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      ModelParams p = p_base;
      p.alpha = alpha_grid[ia];
      p.xi = xi_grid[ix];
      RegionLabel& cell = out.cells[ia * nx + ix];
      cell.alpha = p.alpha;
      cell.xi = p.xi;
      cell.base_region = out.base_region;
      cell.phi = phi_values(p);
      cell.subregion = std::string("A") + digit + std::to_string(subregion_index(cell.phi));
      cell.flags = region_flags(p, tol);
    }
  };

  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n = static_cast<unsigned>(std::min<std::size_t>(n, alpha_grid.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t ia = w; ia < alpha_grid.size(); ia += n) fill_row(ia);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

ConsequencesReport consequences_report(const Atlas& a, double floor_tol) {
  ConsequencesReport r;
  r.floor = prey_floor(a.base);
  r.cells.reserve(a.cells.size());
  for (const auto& cell : a.cells) {
    ConsequenceCell c;
    c.alpha = cell.alpha;
    c.xi = cell.xi;
    c.floor = r.floor;
    c.stable_e2 = cell.flags.e2 && is_stable(*cell.flags.e2);
    if (c.stable_e2) c.eradication_verdict = "stable";
    else if (cell.flags.e2_exists) c.eradication_verdict = "unreachable as stable state (E2 saddle)";
    else c.eradication_verdict = "unreachable (E2 absent)";
    c.dominance_risk = is_stable(cell.flags.e1);
    c.min_stable_x = cell.flags.min_stable_x;
    c.floor_respected = !(c.min_stable_x <= r.floor - floor_tol);
    r.stable_e2_cells += c.stable_e2;
    r.dominance_cells += c.dominance_risk;
    r.floor_violations += !c.floor_respected;
    r.cells.push_back(std::move(c));
  }
  return r;
}

}  // namespace afpp
