#include "afpp/model.hpp"

#include "afpp/error.hpp"

#include <array>
#include <cmath>
#include <string>

namespace afpp {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

constexpr std::array<std::string_view, 6> kParamNames = {"gamma", "alpha", "xi",
                                                         "epsilon", "m", "delta"};

}  // namespace

void DimensionalParams::validate() const {
  require(positive(r), "r must be > 0");
  require(positive(K), "K must be > 0");
  require(positive(c), "c must be > 0");
  require(positive(a), "a must be > 0");
  require(positive(delta1), "delta1 must be > 0");
  require(positive(m1), "m1 must be > 0");
  require(positive(d), "d must be > 0");
  require(positive(alpha), "alpha must be > 0");
  require(std::isfinite(A) && A >= 0.0, "A must be >= 0");
  require(positive(eta), "eta must be > 0");
}

void ModelParams::validate(ValidationPolicy policy) const {
  require(positive(gamma), "gamma must be > 0");
  require(positive(epsilon), "epsilon must be > 0");
  require(positive(m), "m must be > 0");
  require(positive(delta), "delta must be > 0");
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
  require(std::isfinite(xi) && xi >= 0.0, "xi must be >= 0");
  if (!policy.allow_delta_le_m) {
    require(delta > m, "delta must exceed m (pass allow_delta_le_m to override)");
  }
}

std::string_view to_string(Param p) noexcept { return kParamNames[static_cast<int>(p)]; }

Param param_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kParamNames.size(); ++i) {
    if (kParamNames[i] == name) return static_cast<Param>(i);
  }
  if (name == "eps") return Param::Epsilon;
  throw DomainError("unknown parameter '" + std::string(name) + "'");
}

double get(const ModelParams& p, Param which) noexcept {
  switch (which) {
    case Param::Gamma: return p.gamma;
    case Param::Alpha: return p.alpha;
    case Param::Xi: return p.xi;
    case Param::Epsilon: return p.epsilon;
    case Param::M: return p.m;
    case Param::Delta: return p.delta;
  }
  return 0.0;
}

ModelParams with(ModelParams p, Param which, double value) noexcept {
  switch (which) {
    case Param::Gamma: p.gamma = value; break;
    case Param::Alpha: p.alpha = value; break;
    case Param::Xi: p.xi = value; break;
    case Param::Epsilon: p.epsilon = value; break;
    case Param::M: p.m = value; break;
    case Param::Delta: p.delta = value; break;
  }
  return p;
}

ModelParams nondimensionalize(const DimensionalParams& p) {
  p.validate();
  const double ratio = p.A / p.a;
  return ModelParams{
      .gamma = p.K / p.a,
      .alpha = p.alpha,
      .xi = p.eta * ratio * ratio,
      .epsilon = p.d * p.a / p.c,
      .m = p.m1 / p.r,
      .delta = p.delta1 / p.r,
  };
}

StateDerivative rhs(const ModelParams& p, State s) noexcept {
  const double x2 = s.x * s.x;
  const double den = 1.0 + x2 + p.alpha * p.xi;
  return {
      s.x * (1.0 - s.x / p.gamma) - x2 * s.y / den,
      (p.delta * (x2 + p.xi) / den - p.m - p.epsilon * s.y) * s.y,
  };
}

Matrix2 jacobian(const ModelParams& p, State s) noexcept {
  const double x = s.x;
  const double y = s.y;
  const double load = p.food_load();
  const double den = load + x * x;
  const double den2 = den * den;
  Matrix2 J;
  J(0, 0) = 1.0 - 2.0 * x / p.gamma - 2.0 * x * y * load / den2;
  J(0, 1) = -x * x / den;
  J(1, 0) = 2.0 * p.delta * x * y * (1.0 + (p.alpha - 1.0) * p.xi) / den2;
  J(1, 1) = p.delta * (x * x + p.xi) / den - p.m - 2.0 * p.epsilon * y;
  return J;
}

StateDerivative dimensional_rhs(const DimensionalParams& p, double N, double P) noexcept {
  const double food = p.eta * p.A * p.A;
  const double den = p.a * p.a + N * N + p.alpha * food;
  return {
      p.r * N * (1.0 - N / p.K) - p.c * N * N * P / den,
      p.delta1 * (N * N + food) / den * P - p.m1 * P - p.d * P * P,
  };
}

double prey_nullcline_y(const ModelParams& p, double x) {
  if (!(x > 0.0)) throw DomainError("prey nullcline requires x > 0");
  return (1.0 - x / p.gamma) * (1.0 + x * x + p.alpha * p.xi) / x;
}

double predator_nullcline_y(const ModelParams& p, double x) {
  const double x2 = x * x;
  return ((p.delta - p.m) * x2 + predator_intercept_numerator(p)) /
         (p.epsilon * (1.0 + x2 + p.alpha * p.xi));
}

double nullcline_discriminant(const ModelParams& p) noexcept {
  const double load = p.food_load();
  return 4.0 / (p.gamma * p.gamma) * load * (p.gamma * p.gamma - 27.0 * load);
}

double predator_intercept_numerator(const ModelParams& p) noexcept {
  return p.delta * p.xi - p.m * p.food_load();
}

}  // namespace afpp
