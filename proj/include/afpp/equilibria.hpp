#pragma once

#include "afpp/error.hpp"
#include "afpp/model.hpp"

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

namespace afpp {

enum class StabilityClass {
  StableNode,
  StableFocus,
  UnstableNode,
  UnstableFocus,
  Saddle,
  CenterAmbiguous,
  NonHyperbolic,
};

std::string_view to_string(StabilityClass c) noexcept;

bool is_stable(StabilityClass c) noexcept;

enum class EquilibriumKind { E0, E1, E2, Interior };

std::string_view to_string(EquilibriumKind k) noexcept;

/// Tolerances of the eigenvalue-based classification.
struct ClassifyTolerances {
  /// |Re lambda| at or below this declares the point non-hyperbolic.
  double hyperbolic = 1e-7;
  /// Complex pair when |Im lambda| exceeds this multiple of the spectral radius.
  double focus_relative = 1e-9;
};

/// Signs and conditions of the closed-form stability criteria.
struct ClosedFormFlags {
  double phi1 = 0.0;  // delta xi - m (1 + alpha xi)
  double phi2 = 0.0;  // phi1 + (delta - m) gamma^2
  double phi3 = 0.0;  // 1 + alpha xi - xi
  /// Interior points only: x*^2 < 1 + alpha xi.
  bool x_squared_below_load = false;
  /// Interior points only: x* > eps / (1 + eps / gamma).
  bool above_floor = false;
  /// Interior points only: the sufficient asymptotic-stability condition
  /// phi3 > 0 and eps/(1+eps/gamma) < x* < min(sqrt(1+alpha xi), gamma).
  bool sufficient_stability = false;
};

using EigenPair = std::array<std::complex<double>, 2>;

struct Equilibrium {
  State location;
  EquilibriumKind kind = EquilibriumKind::Interior;
  EigenPair eigenvalues{};
  StabilityClass stability = StabilityClass::NonHyperbolic;
  ClosedFormFlags flags;
};

/// Degree-5 polynomial whose roots in (0, gamma) are interior prey levels.
struct QuinticCoefficients {
  std::array<double, 6> c{};  // constant-first
  double operator()(double x) const noexcept;
};

/// Raised when Newton polishing of a companion-matrix root fails.
class RootPolishError : public NumericalError {
 public:
  RootPolishError(const std::string& what, double unpolished)
      : NumericalError(what), unpolished_(unpolished) {}
  double unpolished_root() const noexcept { return unpolished_; }

 private:
  double unpolished_;
};

QuinticCoefficients interior_quintic(const ModelParams& p) noexcept;

/// Eigenvalues of a real 2x2 matrix, ordered by ascending real part.
EigenPair eigenvalues(const Matrix2& J) noexcept;

StabilityClass classify_eigenvalues(const EigenPair& ev, const ClassifyTolerances& tol = {}) noexcept;

/// Interior equilibria sorted by ascending x*; each one classified.
std::vector<Equilibrium> find_interior_equilibria(const ModelParams& p,
                                                  const ClassifyTolerances& tol = {});

/// E0, E1, E2 (when phi1 > 0) and the interior equilibria, all classified.
std::vector<Equilibrium> find_all_equilibria(const ModelParams& p,
                                             const ClassifyTolerances& tol = {});

/// Fills eigenvalues, stability class and closed-form flags.
Equilibrium classify(const ModelParams& p, Equilibrium e, const ClassifyTolerances& tol = {});

/// Interior equilibrium y* from the predator nullcline.
double interior_y(const ModelParams& p, double x) noexcept;

/// Lower floor eps / (1 + eps / gamma) on stable interior prey levels.
double prey_floor(const ModelParams& p) noexcept;

/// Simplified closed forms of det J and tr J at an interior equilibrium.
double interior_determinant_closed_form(const ModelParams& p, State s) noexcept;
double interior_trace_closed_form(const ModelParams& p, State s) noexcept;

/// E2 = (0, phi1 / (eps (1 + alpha xi))) if phi1 > 0.
std::optional<State> prey_free_equilibrium(const ModelParams& p) noexcept;

}  // namespace afpp
