#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>

namespace afpp {

/// Parameters of the dimensional additional-food model.
struct DimensionalParams {
  double r = 1.0;       // prey intrinsic growth rate [1/time]
  double K = 1.0;       // prey carrying capacity [biomass]
  double c = 1.0;       // predation rate [1/time]
  double a = 1.0;       // half saturation [biomass]
  double delta1 = 1.0;  // conversion efficiency [1/time]
  double m1 = 1.0;      // predator death rate [1/time]
  double d = 1.0;       // intra-specific competition [1/(biomass time)]
  double alpha = 1.0;   // quality of additional food
  double A = 1.0;       // additional food biomass
  double eta = 1.0;     // search-rate ratio food/prey

  /// Throws DomainError unless every field is strictly positive, except A,
  /// which may be zero (no additional food).
  void validate() const;
};

/// Options relaxing ModelParams validation.
struct ValidationPolicy {
  /// The analysis assumes delta > m; exploration near the boundary sets this.
  bool allow_delta_le_m = false;
};

/// The six nondimensional parameters.
///
/// gamma, epsilon, m and delta are strictly positive. alpha and xi are
/// non-negative; xi == 0 is the "no additional food" configuration.
struct ModelParams {
  double gamma = 1.0;
  double alpha = 1.0;
  double xi = 1.0;
  double epsilon = 1.0;
  double m = 1.0;
  double delta = 2.0;

  void validate(ValidationPolicy policy = {}) const;

  /// 1 + alpha xi, the food-dependent part of the response denominator.
  double food_load() const noexcept { return 1.0 + alpha * xi; }

  bool operator==(const ModelParams&) const = default;
};

/// Parameter selector used by continuation, sweeps and the CLI.
enum class Param { Gamma, Alpha, Xi, Epsilon, M, Delta };

std::string_view to_string(Param p) noexcept;
Param param_from_string(std::string_view name);
double get(const ModelParams& p, Param which) noexcept;
ModelParams with(ModelParams p, Param which, double value) noexcept;

/// Nondimensional prey/predator biomass.
struct State {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const State&) const = default;
};

/// Time derivative of a State.
struct StateDerivative {
  double dx = 0.0;
  double dy = 0.0;
};

using Matrix2 = Eigen::Matrix2d;

ModelParams nondimensionalize(const DimensionalParams& p);

/// Vector field of the nondimensional system.
StateDerivative rhs(const ModelParams& p, State s) noexcept;

/// Analytic Jacobian [[f_x, f_y], [g_x, g_y]].
Matrix2 jacobian(const ModelParams& p, State s) noexcept;

/// Vector field of the dimensional system, (dN/dT, dP/dT).
StateDerivative dimensional_rhs(const DimensionalParams& p, double N, double P) noexcept;

/// Non-trivial prey nullcline; requires x > 0.
double prey_nullcline_y(const ModelParams& p, double x);

/// Non-trivial predator nullcline. Total: the value may be negative.
double predator_nullcline_y(const ModelParams& p, double x);

/// Discriminant of the prey-nullcline slope cubic. Positive: crest and
/// trough; negative: monotone.
double nullcline_discriminant(const ModelParams& p) noexcept;

/// delta xi - m (1 + alpha xi). Sign decides E0's type and E2's existence.
double predator_intercept_numerator(const ModelParams& p) noexcept;

}  // namespace afpp
