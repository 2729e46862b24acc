#pragma once

#include "afpp/equilibria.hpp"
#include "afpp/model.hpp"
#include "afpp/simulation.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace afpp {

enum class BifurcationKind { Transcritical, SaddleNode, Hopf, Fold, FocusNodeTransition };

std::string_view to_string(BifurcationKind k) noexcept;

/// W.H_mu, W.(DH_mu V) and W.D^2H(V,V) at a non-hyperbolic equilibrium with a
/// simple zero eigenvalue (V right, W left null vector).
struct SotomayorQuantities {
  double w_h_mu = 0.0;
  double w_dh_mu_v = 0.0;
  double w_d2h_vv = 0.0;
  /// W.H_mu != 0 and W.D^2H(V,V) != 0.
  bool saddle_node_conditions = false;
  /// W.H_mu == 0, W.DH_mu V != 0 and W.D^2H(V,V) != 0.
  bool transcritical_conditions = false;
};

struct BifurcationEvent {
  BifurcationKind kind = BifurcationKind::Fold;
  Param param = Param::Xi;
  double param_value = 0.0;
  /// Parameter bracket across which the test function changes sign.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  State location;
  EigenPair eigenvalues{};
  std::optional<SotomayorQuantities> sotomayor;
  int branch_id = 0;
  std::string note;
};

/// Analytic critical point of the food-quantity parameter.
struct CriticalXi {
  double xi_star = 0.0;
  /// Numerically bracketed sign change of the critical eigenvalue (or of the
  /// existence condition), width <= bracket tolerance.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  State location;
  EigenPair eigenvalues{};
  SotomayorQuantities sotomayor;
};

inline constexpr double kBifurcationTol = 1e-8;
inline constexpr double kSotomayorFloor = 1e-12;

/// xi* = (m(1+gamma^2) - delta gamma^2) / (delta - m alpha) where E1 = (gamma, 0)
/// exchanges stability with the interior branch. Throws DomainError on
/// degenerate parameters (delta = m alpha or a vanishing nondegeneracy term).
CriticalXi transcritical_xi_critical(const ModelParams& p, double bracket_tol = kBifurcationTol);

/// xi* = m / (delta - m alpha) where E2 enters the positive quadrant through
/// the origin. Throws DomainError when delta = m alpha.
CriticalXi saddlenode_xi_critical(const ModelParams& p, double bracket_tol = kBifurcationTol);

struct BranchPoint {
  double param_value = 0.0;
  Equilibrium equilibrium;
  int branch_id = 0;
};

struct ContinuationOptions {
  /// Step sizes in arclength, with the parameter scaled by the range width.
  double initial_step = 1e-4;
  double max_step = 0.05;
  int max_halvings = 12;
  std::size_t max_points = 200000;
  double newton_tol = 1e-12;
  double event_tol = kBifurcationTol;
  /// +1 continues towards the upper range end first, -1 towards the lower.
  int direction = +1;
  ClassifyTolerances classify;
};

struct ContinuationResult {
  std::vector<BranchPoint> points;
  std::vector<BifurcationEvent> events;
  bool truncated = false;
  std::string notice;

  std::size_t count(BifurcationKind k) const noexcept;
};

/// Pseudo-arclength continuation of an interior equilibrium in one parameter.
ContinuationResult continue_branch(const ModelParams& p, Param param, std::pair<double, double> range,
                                   const Equilibrium& seed, const ContinuationOptions& opts = {},
                                   int branch_id = 0);

/// Every interior branch meeting either end of the range, deduplicated.
std::vector<ContinuationResult> continue_all_branches(const ModelParams& p, Param param,
                                                      std::pair<double, double> range,
                                                      const ContinuationOptions& opts = {});

/// Zeros of Re(lambda) of a complex pair along all interior branches in range.
std::vector<BifurcationEvent> detect_hopf(const ModelParams& p, Param param,
                                          std::pair<double, double> range,
                                          const ContinuationOptions& opts = {});

struct SweepJump {
  double t = 0.0;
  double eps = 0.0;
  bool upward = true;
};

struct SweepResult {
  double eps_min = 0.0;
  double eps_max = 0.0;
  double period = 0.0;
  int cycles = 0;
  Trajectory trajectory;
  /// Signed shoelace area of the closed (eps, x) curve over the last cycle;
  /// positive when traversed counterclockwise.
  double loop_area_proxy = 0.0;
  /// Threshold (midpoint of the x range over the last cycle) used for jumps.
  double jump_threshold = 0.0;
  std::vector<SweepJump> jumps;
};

/// eps(t) = (eps_min + eps_max)/2 + (eps_max - eps_min)/2 sin(2 pi t / period), t in [0, cycles period].
SweepResult hysteresis_sweep(const ModelParams& p, double eps_min, double eps_max, double period,
                             int cycles, State initial, const SimulationOptions& opts = {},
                             std::size_t samples_per_cycle = 200000);

}  // namespace afpp
