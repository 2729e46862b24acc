#pragma once

#include "afpp/error.hpp"
#include "afpp/model.hpp"
#include "afpp/sqp.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace afpp::control {

/// Quality: alpha is the control. Quantity: xi is the control.
enum class ControlKind { Quality, Quantity };

std::string_view to_string(ControlKind k) noexcept;
ControlKind control_kind_from_string(std::string_view name);

/// Default bounds when a problem does not state them.
std::pair<double, double> default_bounds(ControlKind k) noexcept;

struct ControlProblem {
  /// The controlled field of params is ignored and replaced by u.
  ModelParams params;
  ControlKind control = ControlKind::Quality;
  double u_min = 0.5;
  double u_max = 2.0;
  State initial;
  State target;
  int mesh_size = 40;
  /// Minimize the transformed duration S; otherwise the physical duration T.
  bool in_transformed_time = true;
  nlp::Options nlp;

  /// Throws DomainError on u_min >= u_max, non-positive endpoints or mesh_size < 20.
  void validate() const;
};

struct Costate {
  double p = 0.0;
  double q = 0.0;
};

/// Parameters with the controlled field set to u.
ModelParams controlled_params(const ModelParams& p, double u, ControlKind k) noexcept;

/// Field in the reparameterized time dt = (1 + alpha xi + x^2) ds.
StateDerivative transformed_rhs(const ModelParams& p, State s, double u, ControlKind k) noexcept;

/// dt/ds.
double time_scale(const ModelParams& p, State s, double u, ControlKind k) noexcept;

/// p fx + q fy of the transformed field.
double hamiltonian(const ModelParams& p, State s, Costate c, double u, ControlKind k) noexcept;

/// (-dH/dx, -dH/dy).
Costate adjoint_rhs(const ModelParams& p, State s, Costate c, double u, ControlKind k) noexcept;

/// dH/du. Minimization picks u_max where it is negative.
double switching_function(const ModelParams& p, State s, Costate c, ControlKind k) noexcept;

/// Costate ratios p/q on sigma = 0 and on d sigma/ds = 0.
struct SingularRatios {
  double ratio1 = 0.0;
  double ratio2 = 0.0;
  /// A denominator vanished; the ratios are NaN.
  bool excluded = false;

  bool candidate(double tol) const noexcept;
};

SingularRatios singular_arc_ratios(const ModelParams& p, State s, double u, ControlKind k) noexcept;

/// Analytic reachability bounds: no admissible control lifts x above
/// prey_ceiling or y above predator_ceiling.
struct Reachability {
  double prey_ceiling = 0.0;
  double predator_ceiling = 0.0;
  /// Amount by which the target exceeds a ceiling (0 when not excluded).
  double excess = 0.0;
  bool reachable = true;
};

Reachability reachability(const ControlProblem& prob);

struct NlpStats {
  std::string status;
  int iterations = 0;
  int qp_iterations = 0;
  int variables = 0;
  int constraints = 0;
  double objective = 0.0;
  double stationarity = 0.0;
  double constraint_violation = 0.0;
  double complementarity = 0.0;
  double max_defect = 0.0;
  double endpoint_mismatch = 0.0;
};

struct ControlSolution {
  std::vector<double> s_grid;
  std::vector<double> t_grid;
  std::vector<State> states;
  /// One value per interval.
  std::vector<double> controls;
  /// Costates at the nodes from the NLP multipliers (empty if unavailable).
  std::vector<Costate> costates;
  /// Discrete switching function per interval, from the multipliers.
  std::vector<double> sigma;
  std::vector<double> switching_times_s;
  std::vector<double> switching_times_t;
  double S_opt = 0.0;
  double T_opt = 0.0;
  NlpStats nlp_stats;
  /// Set when the NLP stopped short of the KKT tolerance with a feasible iterate.
  std::optional<std::string> warning;
};

/// Direct multiple shooting with one RK4 step per interval and free S.
/// Throws InfeasibleError (best residual attached) when the target is
/// certified unreachable or the NLP ends infeasible.
ControlSolution solve(const ControlProblem& prob);

struct CalibrationAttempt {
  double u_min = 0.0;
  double u_max = 0.0;
  bool feasible = false;
  double T_opt = 0.0;
  std::string note;
};

struct Calibration {
  ControlProblem problem;  // with the chosen bounds
  std::optional<ControlSolution> solution;
  std::vector<CalibrationAttempt> attempts;
  bool matched = false;
};

/// Tries candidate bounds in order and stops at the first T_opt within
/// rel_tol of target_T. Empty candidates use the kind's default list.
Calibration calibrate_bounds(const ControlProblem& prob, double target_T, double rel_tol = 0.1,
                             std::vector<std::pair<double, double>> candidates = {});

struct PmpReport {
  /// "multipliers" or "adjoint".
  std::string costate_source;
  std::optional<std::string> warning;
  std::vector<double> sigma;
  std::vector<Costate> costates;
  std::size_t checked = 0;
  std::size_t consistent = 0;
  std::size_t excluded = 0;
  double fraction = 0.0;
  double sigma_tol = 0.0;
  double min_costate_norm = 0.0;
  std::size_t singular_candidates = 0;
  /// Every switching time has a sign change of sigma within one interval.
  bool switches_bracketed = true;
  /// Share of intervals whose control is within 1e-6 of a bound.
  double bang_fraction = 0.0;
};

struct PmpOptions {
  /// Relative to max |sigma|.
  double sigma_rel_tol = 1e-4;
  double bound_tol = 1e-6;
  double singular_tol = 1e-3;
  /// Ignore the multipliers and integrate the adjoint backwards.
  bool force_adjoint = false;
};

PmpReport verify_pmp(const ControlSolution& sol, const ControlProblem& prob, const PmpOptions& opts = {});

/// Constant-control trajectory at the bound midpoint over the solution's S,
/// with costates integrated back from the solution's terminal costate.
/// verify_pmp on it is expected to fail.
ControlSolution constant_control_counterexample(const ControlSolution& sol, const ControlProblem& prob);

/// Physical-time re-simulation of the piecewise control over t_grid.
struct Resimulation {
  std::vector<double> times;
  std::vector<State> states;
  State final_state;
  double target_error = 0.0;
};

Resimulation resimulate_physical(const ControlSolution& sol, const ControlProblem& prob);

}  // namespace afpp::control
