#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace afpp::ode {

using Vec2 = Eigen::Vector2d;
using Field = std::function<Vec2(double, const Vec2&)>;

struct StepperOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Zero picks the first step automatically.
  double initial_step = 0.0;
  double max_step = std::numeric_limits<double>::infinity();
  /// Steps below this (or below the round-off floor at t) count as underflow.
  double min_step = 1e-14;
  std::size_t max_steps = 50'000'000;
  /// When positive, disables error control and uses this constant step.
  double fixed_step = 0.0;
};

/// Accepted step endpoint: time, state and derivative (for Hermite output).
struct Node {
  double t = 0.0;
  Vec2 z = Vec2::Zero();
  Vec2 dz = Vec2::Zero();
};

enum class StepStatus { Ok, Underflow, TooManySteps, NonFinite };

struct StepperResult {
  std::vector<Node> nodes;
  StepStatus status = StepStatus::Ok;
  std::size_t rejected = 0;
};

/// Called after every accepted step; may modify the state in place
/// (returning true signals the derivative must be recomputed).
using StepHook = std::function<bool(double t, Vec2& z)>;

/// Dormand-Prince 5(4) with local extrapolation from t0 to t1.
StepperResult dopri5(const Field& f, double t0, const Vec2& z0, double t1,
                     const StepperOptions& opts, const StepHook& hook = {});

/// Cubic Hermite interpolation between two nodes.
Vec2 hermite(const Node& a, const Node& b, double t) noexcept;

/// Dense output over a node sequence; clamps outside the covered interval.
Vec2 interpolate(const std::vector<Node>& nodes, double t);

}  // namespace afpp::ode
