#include "afpp/ode.hpp"

#include "afpp/error.hpp"

#include <algorithm>
#include <cmath>

namespace afpp::ode {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Vec2& err, const Vec2& z0, const Vec2& z1, const StepperOptions& o) {
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(z0[i]), std::abs(z1[i]));
    const double r = err[i] / sc;
    sum += r * r;
  }
  return std::sqrt(sum / 2.0);
}

double initial_step(const Field& f, double t0, const Vec2& z0, const Vec2& f0, double span,
                    const StepperOptions& o) {
  auto scaled = [&](const Vec2& v) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double r = v[i] / (o.atol + o.rtol * std::abs(z0[i]));
      s += r * r;
    }
    return std::sqrt(s / 2.0);
  };
  const double d0 = scaled(z0);
  const double d1 = scaled(f0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const Vec2 f1 = f(t0 + h0, z0 + h0 * f0);
  const double d2 = scaled(f1 - f0) / h0;
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

StepperResult dopri5(const Field& f, double t0, const Vec2& z0, double t1,
                     const StepperOptions& opts, const StepHook& hook) {
  StepperResult out;
  const double span = t1 - t0;
  if (!(span > 0.0)) throw DomainError("integration interval must have positive length");

  Vec2 z = z0;
  double t = t0;
  Vec2 k1 = f(t, z);
  out.nodes.push_back({t, z, k1});

  const bool fixed = opts.fixed_step > 0.0;
  double h = fixed ? opts.fixed_step
                   : (opts.initial_step > 0.0 ? opts.initial_step : initial_step(f, t, z, k1, span, opts));
  h = std::min(h, opts.max_step);
  double err_old = 1e-4;
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > opts.max_steps) {
      out.status = StepStatus::TooManySteps;
      return out;
    }
    const bool last = t + h >= t1 - 1e-14 * std::abs(t1);
    if (last) h = t1 - t;
    if (!fixed && (h < opts.min_step || h <= 16.0 * 2.2e-16 * std::abs(t))) {
      out.status = StepStatus::Underflow;
      return out;
    }

    const Vec2 k2 = f(t + c2 * h, z + h * (a21 * k1));
    const Vec2 k3 = f(t + c3 * h, z + h * (a31 * k1 + a32 * k2));
    const Vec2 k4 = f(t + c4 * h, z + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 = f(t + c5 * h, z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 k6 = f(t + h, z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec2 z_new = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vec2 k7 = f(t + h, z_new);

    if (!z_new.allFinite() || !k7.allFinite()) {
      if (fixed) {
        out.status = StepStatus::NonFinite;
        return out;
      }
      h *= 0.25;
      ++out.rejected;
      continue;
    }

    if (!fixed) {
      const Vec2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = error_norm(err, z, z_new, opts);
      if (en > 1.0) {
        h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
        ++out.rejected;
        continue;
      }
      // Lund-stabilised PI controller.
      constexpr double beta = 0.04;
      const double e = std::max(en, 1e-10);
      double fac = 0.9 * std::pow(e, -0.2 + 0.75 * beta) * std::pow(err_old, beta);
      fac = std::clamp(fac, 0.2, 5.0);
      err_old = std::max(en, 1e-4);
      t = last ? t1 : t + h;
      h = std::min(h * fac, opts.max_step);
    } else {
      t = last ? t1 : t + h;
    }

    z = z_new;
    if (hook && hook(t, z)) k7 = f(t, z);
    k1 = k7;
    out.nodes.push_back({t, z, k1});
  }
  return out;
}

Vec2 hermite(const Node& a, const Node& b, double t) noexcept {
  const double h = b.t - a.t;
  if (h <= 0.0) return a.z;
  const double s = (t - a.t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * a.z + h10 * h * a.dz + h01 * b.z + h11 * h * b.dz;
}

Vec2 interpolate(const std::vector<Node>& nodes, double t) {
  if (nodes.empty()) throw DomainError("cannot interpolate an empty trajectory");
  if (t <= nodes.front().t) return nodes.front().z;
  if (t >= nodes.back().t) return nodes.back().z;
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                                   [](double v, const Node& n) { return v < n.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return hermite(a, b, t);
}

}  // namespace afpp::ode
