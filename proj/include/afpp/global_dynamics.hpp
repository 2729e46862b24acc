#pragma once

#include "afpp/equilibria.hpp"
#include "afpp/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace afpp {

enum class BaseRegion { R1, R2, R3, Unclassified };

std::string_view to_string(BaseRegion r) noexcept;

struct PhiValues {
  double phi1 = 0.0;  // delta xi - m (1 + alpha xi)
  double phi2 = 0.0;  // phi1 + (delta - m) gamma^2
  double phi3 = 0.0;  // 1 + alpha xi - xi
};

PhiValues phi_values(const ModelParams& p) noexcept;

/// Recomputed from the equilibria of the cell, never from the label.
struct RegionFlags {
  StabilityClass e0 = StabilityClass::NonHyperbolic;
  StabilityClass e1 = StabilityClass::NonHyperbolic;
  bool e2_exists = false;
  std::optional<StabilityClass> e2;
  int interior_count = 0;
  int stable_interior_count = 0;
  /// E1 stable together with at least one stable interior equilibrium.
  bool bistable = false;
  /// Smallest x* over stable interior equilibria (NaN when none).
  double min_stable_x = 0.0;
  /// Set when the equilibrium computation failed for this cell.
  std::string error;
};

struct RegionLabel {
  double alpha = 0.0;
  double xi = 0.0;
  BaseRegion base_region = BaseRegion::Unclassified;
  /// "A" + base digit + sign-triple index; see subregion_index.
  std::string subregion;
  PhiValues phi;
  RegionFlags flags;
};

/// Operational subregion index from the phi signs:
/// 1: phi1 > 0, phi3 <= 0   2: phi1 > 0, phi3 > 0
/// 3: phi1 <= 0, phi2 > 0, phi3 > 0   4: phi1 <= 0, phi2 > 0, phi3 <= 0
/// 5: phi2 <= 0
int subregion_index(const PhiValues& phi) noexcept;

/// Text describing the sign-triple mapping, emitted in atlas headers.
std::string subregion_mapping();

/// R1: no interior equilibrium, R2: unique stable interior node, R3: unique
/// stable interior focus, evaluated at xi = 0. Throws DomainError if xi != 0.
BaseRegion classify_base_region(const ModelParams& p_no_food, const ClassifyTolerances& tol = {});

RegionFlags region_flags(const ModelParams& p, const ClassifyTolerances& tol = {});

struct Atlas {
  ModelParams base;
  BaseRegion base_region = BaseRegion::Unclassified;
  std::vector<double> alpha_grid;
  std::vector<double> xi_grid;
  /// Row-major: alpha index outer, xi index inner.
  std::vector<RegionLabel> cells;

  const RegionLabel& at(std::size_t ia, std::size_t ix) const { return cells.at(ia * xi_grid.size() + ix); }
};

/// n points log-spaced on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// Parallel over rows; threads = 0 picks the hardware concurrency. Results do
/// not depend on the thread count.
Atlas atlas(const ModelParams& p_base, const std::vector<double>& alpha_grid,
            const std::vector<double>& xi_grid, unsigned threads = 0, const ClassifyTolerances& tol = {});

struct ConsequenceCell {
  double alpha = 0.0;
  double xi = 0.0;
  std::string eradication_verdict;
  bool stable_e2 = false;
  /// E1 (pest only) stable.
  bool dominance_risk = false;
  /// NaN when no stable interior equilibrium exists.
  double min_stable_x = 0.0;
  double floor = 0.0;
  bool floor_respected = true;
};

struct ConsequencesReport {
  double floor = 0.0;  // eps / (1 + eps / gamma)
  std::vector<ConsequenceCell> cells;
  std::size_t stable_e2_cells = 0;
  std::size_t dominance_cells = 0;
  std::size_t floor_violations = 0;
};

ConsequencesReport consequences_report(const Atlas& a, double floor_tol = 1e-9);

}  // namespace afpp
