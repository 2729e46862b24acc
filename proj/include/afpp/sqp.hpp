#pragma once

#include <Eigen/Core>

#include <functional>
#include <string_view>

namespace afpp::nlp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// min 0.5 d'Hd + g'd  s.t.  A d = b,  lower <= d <= upper (entries may be infinite).
struct QPResult {
  Vector d;
  /// Multipliers of A d = b with stationarity H d + g - A'y - z_lower + z_upper = 0.
  Vector y;
  Vector z_lower;
  Vector z_upper;
  int iterations = 0;
  bool converged = false;
};

/// Mehrotra predictor-corrector interior point on the dense KKT system.
QPResult solve_box_qp(const Matrix& H, const Vector& g, const Matrix& A, const Vector& b,
                      const Vector& lower, const Vector& upper, double tol = 1e-10, int max_iter = 200);

struct Evaluation {
  double f = 0.0;
  Vector grad;
  Vector c;
  Matrix jac;
};

/// min f(x)  s.t.  c(x) = 0,  lower <= x <= upper.
struct Problem {
  Vector lower;
  Vector upper;
  std::function<void(const Vector& x, Evaluation& out)> evaluate;
  /// Optional positive semidefinite model of the Lagrangian Hessian at
  /// (x, lambda); replaces the BFGS update when set.
  std::function<void(const Vector& x, const Vector& lambda, Matrix& out)> hessian;
};

struct Options {
  double kkt_tol = 1e-7;
  double feasibility_tol = 1e-9;
  int max_iter = 500;
};

enum class Status { Converged, MaxIterations, LineSearchFailure, QPFailure };

std::string_view to_string(Status s) noexcept;

struct Result {
  Vector x;
  /// Multipliers for the Lagrangian f + lambda'c - z_lower'(x - l) - z_upper'(u - x).
  Vector lambda;
  Vector z_lower;
  Vector z_upper;
  Status status = Status::MaxIterations;
  int iterations = 0;
  int qp_iterations = 0;
  double objective = 0.0;
  double stationarity = 0.0;
  double constraint_violation = 0.0;
  double complementarity = 0.0;
};

/// SQP with damped BFGS (or a supplied Hessian model), elastic QP fallback,
/// second-order correction and an l1 merit line search. x0 is projected into
/// the bounds.
Result solve_sqp(const Problem& problem, Vector x0, const Options& opts = {});

}  // namespace afpp::nlp
