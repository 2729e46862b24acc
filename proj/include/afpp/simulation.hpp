#pragma once

#include "afpp/error.hpp"
#include "afpp/model.hpp"
#include "afpp/ode.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace afpp {

enum class TrajectoryEventKind { PositivityClamp, EnvelopeViolation, Warning };

std::string_view to_string(TrajectoryEventKind k) noexcept;

struct TrajectoryEvent {
  double t = 0.0;
  TrajectoryEventKind kind = TrajectoryEventKind::Warning;
  std::string detail;
};

struct SimulationOptions {
  ode::StepperOptions stepper;
  double t_start = 0.0;
  /// Components below -positivity_tol are reported before being clamped.
  double positivity_tol = 1e-10;
  bool monitor_envelope = true;
  double envelope_tol = 1e-6;
  /// K of the Gronwall envelope; defaults to m.
  std::optional<double> envelope_K;
};

/// Accepted integrator steps with cubic Hermite dense output.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<StateDerivative> rates;
  std::vector<double> eps_effective;
  std::vector<TrajectoryEvent> events;
  std::size_t rejected_steps = 0;
  bool truncated = false;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
  /// Dense output; clamps to the covered interval.
  State at(double t) const;
  /// n equally spaced dense-output samples on [t0, t1].
  std::vector<State> sample(double t0, double t1, std::size_t n) const;
  std::size_t count(TrajectoryEventKind k) const noexcept;
};

/// Integration broke down; carries what was computed up to the failure.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, Trajectory partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }
  double last_time() const noexcept { return partial_.empty() ? 0.0 : partial_.times.back(); }

 private:
  Trajectory partial_;
};

using EpsSchedule = std::function<double(double)>;

Trajectory integrate(const ModelParams& p, State initial, double t_end,
                     const SimulationOptions& opts = {});

/// As integrate, with epsilon replaced by eps_fn(t) at every stage.
Trajectory integrate_nonautonomous(const ModelParams& p, const EpsSchedule& eps_fn, State initial,
                                   double t_end, const SimulationOptions& opts = {});

/// Gronwall envelope for W = x + y / delta: dW/dt + K W <= M.
struct BoundEnvelope {
  double K_choice = 0.0;
  /// Closed form gamma (1+K)^2/4 + xi/eps + (K-m)^2/(4 eps); not a bound in general.
  double M = 0.0;
  double asymptotic_bound = 0.0;
  /// Sharp supremum of dW/dt + K W over the positive quadrant.
  double M_valid = 0.0;
  double asymptotic_bound_valid = 0.0;

  /// (M/K)(1 - e^{-Kt}) + W0 e^{-Kt}, with M_valid or M.
  double gronwall(double W0, double t, bool valid = true) const noexcept;
};

BoundEnvelope bound_envelope(const ModelParams& p, std::optional<double> K_choice = std::nullopt);

double envelope_W(const ModelParams& p, State s) noexcept;

/// dW/dt + K W at s.
double envelope_rate(const ModelParams& p, double K, State s) noexcept;

}  // namespace afpp
