#include "afpp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace afpp {
namespace {

ode::Vec2 as_vec(State s) { return {s.x, s.y}; }
State as_state(const ode::Vec2& v) { return {v[0], v[1]}; }

Trajectory run(const ModelParams& p, const EpsSchedule* eps_fn, State initial, double t_end,
               const SimulationOptions& opts) {
  if (!(std::isfinite(initial.x) && std::isfinite(initial.y)) || initial.x < 0.0 || initial.y < 0.0) {
    throw DomainError("initial state must be finite and non-negative");
  }
  if (!(t_end > opts.t_start)) throw DomainError("t_end must exceed the start time");

  auto eps_at = [&](double t) { return eps_fn ? (*eps_fn)(t) : p.epsilon; };
  const ode::Field field = [&](double t, const ode::Vec2& z) {
    ModelParams q = p;
    q.epsilon = eps_at(t);
    const auto d = rhs(q, {z[0], z[1]});
    return ode::Vec2(d.dx, d.dy);
  };

  std::vector<TrajectoryEvent> events;
  const ode::StepHook clamp = [&](double t, ode::Vec2& z) {
    bool changed = false;
    for (int i = 0; i < 2; ++i) {
      if (z[i] >= 0.0) continue;
      if (z[i] < -opts.positivity_tol) {
        std::ostringstream msg;
        msg << (i == 0 ? "x" : "y") << "=" << z[i] << " clamped to 0";
        events.push_back({t, TrajectoryEventKind::PositivityClamp, msg.str()});
      }
      z[i] = 0.0;
      changed = true;
    }
    return changed;
  };

  const auto res = ode::dopri5(field, opts.t_start, as_vec(initial), t_end, opts.stepper, clamp);

  Trajectory out;
  out.rejected_steps = res.rejected;
  out.times.reserve(res.nodes.size());
  out.states.reserve(res.nodes.size());
  out.rates.reserve(res.nodes.size());
  out.eps_effective.reserve(res.nodes.size());
  for (const auto& n : res.nodes) {
    out.times.push_back(n.t);
    out.states.push_back(as_state(n.z));
    out.rates.push_back({n.dz[0], n.dz[1]});
    out.eps_effective.push_back(eps_at(n.t));
  }
  out.events = std::move(events);

  if (!eps_fn && opts.monitor_envelope) {
    const auto env = bound_envelope(p, opts.envelope_K);
    const double W0 = envelope_W(p, initial);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double W = envelope_W(p, out.states[i]);
      const double bound = env.gronwall(W0, out.times[i] - opts.t_start);
      if (W > bound + opts.envelope_tol) {
        std::ostringstream msg;
        msg << "W=" << W << " exceeds envelope " << bound;
        out.events.push_back({out.times[i], TrajectoryEventKind::EnvelopeViolation, msg.str()});
      }
    }
  }

  if (res.status != ode::StepStatus::Ok) {
    out.truncated = true;
    std::ostringstream msg;
    msg << (res.status == ode::StepStatus::Underflow      ? "step-size underflow"
            : res.status == ode::StepStatus::TooManySteps ? "step budget exhausted"
                                                          : "non-finite state")
        << " at t=" << out.times.back();
    throw IntegrationError(msg.str(), std::move(out));
  }
  return out;
}

}  // namespace

std::string_view to_string(TrajectoryEventKind k) noexcept {
  switch (k) {
    case TrajectoryEventKind::PositivityClamp: return "positivity_clamp";
    case TrajectoryEventKind::EnvelopeViolation: return "envelope_violation";
    case TrajectoryEventKind::Warning: return "warning";
  }
  return "?";
}

State Trajectory::at(double t) const {
  if (empty()) throw DomainError("empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto j = static_cast<std::size_t>(it - times.begin());
  const ode::Node a{times[j - 1], as_vec(states[j - 1]), {rates[j - 1].dx, rates[j - 1].dy}};
  const ode::Node b{times[j], as_vec(states[j]), {rates[j].dx, rates[j].dy}};
  return as_state(ode::hermite(a, b, t));
}

std::vector<State> Trajectory::sample(double t0, double t1, std::size_t n) const {
  std::vector<State> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(at(t));
  }
  return out;
}

std::size_t Trajectory::count(TrajectoryEventKind k) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [k](const TrajectoryEvent& e) { return e.kind == k; }));
}

Trajectory integrate(const ModelParams& p, State initial, double t_end, const SimulationOptions& opts) {
  return run(p, nullptr, initial, t_end, opts);
}

Trajectory integrate_nonautonomous(const ModelParams& p, const EpsSchedule& eps_fn, State initial,
                                   double t_end, const SimulationOptions& opts) {
  if (!eps_fn) throw DomainError("epsilon schedule is empty");
  return run(p, &eps_fn, initial, t_end, opts);
}

double BoundEnvelope::gronwall(double W0, double t, bool valid) const noexcept {
  const double decay = std::exp(-K_choice * t);
  const double asym = valid ? asymptotic_bound_valid : asymptotic_bound;
  return asym * (1.0 - decay) + W0 * decay;
}

BoundEnvelope bound_envelope(const ModelParams& p, std::optional<double> K_choice) {
  const double K = K_choice.value_or(p.m);
  if (!(K > 0.0)) throw DomainError("envelope K must be > 0");
  BoundEnvelope env;
  env.K_choice = K;
  const double prey_part = p.gamma * (1.0 + K) * (1.0 + K) / 4.0;
  env.M = prey_part + p.xi / p.epsilon + (K - p.m) * (K - p.m) / (4.0 * p.epsilon);
  // y enters as y (xi/(1+alpha xi+x^2) + (K-m)/delta) - eps y^2 / delta, largest at x = 0.
  const double slope = std::max(0.0, p.xi / p.food_load() + (K - p.m) / p.delta);
  env.M_valid = prey_part + p.delta * slope * slope / (4.0 * p.epsilon);
  env.asymptotic_bound = env.M / K;
  env.asymptotic_bound_valid = env.M_valid / K;
  return env;
}

double envelope_W(const ModelParams& p, State s) noexcept { return s.x + s.y / p.delta; }

double envelope_rate(const ModelParams& p, double K, State s) noexcept {
  const auto d = rhs(p, s);
  return d.dx + d.dy / p.delta + K * envelope_W(p, s);
}

}  // namespace afpp
