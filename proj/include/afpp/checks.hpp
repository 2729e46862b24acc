#pragma once

#include "afpp/model.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace afpp::checks {

/// Outcome of one randomized property suite.
struct SuiteResult {
  std::string name;
  std::size_t samples = 0;
  std::size_t failures = 0;
  /// Worst value of the audited metric and the tolerance it is held to.
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  /// Parameters of the worst sample, as JSON text.
  std::string worst_case;

  bool passed() const noexcept { return samples > 0 && failures == 0; }
};

/// Parameter draw used by every suite: gamma in [1, 20], alpha in [0, 2],
/// xi in [0, 3], eps log-uniform in [0.01, 1], m in [0.1, 2], delta in m + [0.05, 5].
ModelParams random_params(std::mt19937_64& rng);

/// Max-entry error of a central-difference Jacobian of rhs, relative to max(1, max |J|).
double jacobian_fd_error(const ModelParams& p, State s);

/// Same for the adjoint against central differences of the Hamiltonian (both control kinds).
double adjoint_fd_error(const ModelParams& p, State s, double p_costate, double q_costate, double u, bool quality);

/// |Q(x)| / sum |c_i| |x|^i for the interior quintic Q.
double quintic_relative_residual(const ModelParams& p, double x);

/// Trajectories from random starts never leave the closed quadrant (clamp
/// events) and stay under the Gronwall envelope of W = x + y/delta.
SuiteResult positivity_boundedness(std::uint64_t seed, std::size_t runs = 1000, double envelope_tol = 1e-6);

SuiteResult jacobian_audit(std::uint64_t seed, std::size_t samples = 1000, double rel_tol = 1e-5);

SuiteResult adjoint_audit(std::uint64_t seed, std::size_t samples = 1000, double rel_tol = 1e-5);

/// Sign tests on phi1 / phi2 against eigenvalue classes of E0, E1, E2 (hyperbolic cases).
SuiteResult lemma_concordance(std::uint64_t seed, std::size_t draws = 2000);

/// Quintic (relative) and vector-field residuals of every interior equilibrium.
SuiteResult interior_residuals(std::uint64_t seed, std::size_t draws = 1000, double tol = 1e-9);

std::vector<SuiteResult> run_all(std::uint64_t seed);

/// Determinant of the Sylvester matrix of the interior quintic and its
/// derivative; vanishes where the quintic has a double root.
double quintic_resultant(const ModelParams& p);

struct FoldOracle {
  double value = 0.0;
  double x = 0.0;
};

/// Parameter values in [lo, hi] where a double root of the quintic lies in
/// (0, gamma) with positive predator level. Scans n points, then bisects
/// each sign change of the resultant to tol.
std::vector<FoldOracle> resultant_folds(const ModelParams& p, Param which, double lo, double hi,
                                        std::size_t n = 4000, double tol = 1e-13);

}  // namespace afpp::checks
