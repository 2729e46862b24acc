#include "afpp/polynomial.hpp"

#include "afpp/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace afpp::poly {

double evaluate(std::span<const double> coeffs, double x) noexcept {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<double> evaluate(std::span<const double> coeffs, std::complex<double> z) noexcept {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<double> derivative(std::span<const double> coeffs) {
  std::vector<double> out;
  for (std::size_t i = 1; i < coeffs.size(); ++i) out.push_back(static_cast<double>(i) * coeffs[i]);
  return out;
}

std::vector<std::complex<double>> roots(std::span<const double> coeffs) {
  std::size_t n = coeffs.size();
  while (n > 0 && coeffs[n - 1] == 0.0) --n;
  if (n < 2) return {};
  const int degree = static_cast<int>(n) - 1;
  const double lead = coeffs[n - 1];

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[i] / lead;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue iteration failed");

  const auto dcoeffs = derivative(coeffs.first(n));
  std::vector<std::complex<double>> out;
  out.reserve(degree);
  for (int i = 0; i < degree; ++i) {
    std::complex<double> z = solver.eigenvalues()[i];
    for (int it = 0; it < 3; ++it) {
      const auto dp = evaluate(dcoeffs, z);
      if (std::abs(dp) == 0.0) break;
      const auto step = evaluate(coeffs.first(n), z) / dp;
      // Accept only contracting steps; near multiple roots Newton can wander.
      if (!(std::abs(step) < 1e-3 * (1.0 + std::abs(z)))) break;
      z -= step;
    }
    out.push_back(z);
  }
  return out;
}

PolishResult polish_real_root(std::span<const double> coeffs, double guess, int max_iter) {
  using ld = long double;
  auto eval = [&](ld x, ld& value, ld& slope, ld& scale) {
    value = 0;
    slope = 0;
    scale = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
      slope = slope * x + value;
      value = value * x + *it;
      scale = scale * std::fabs(x) + std::fabs(static_cast<ld>(*it));
    }
  };

  ld x = guess;
  ld value = 0;
  ld slope = 0;
  ld scale = 0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    eval(x, value, slope, scale);
    if (value == 0) {
      converged = true;
      break;
    }
    if (slope == 0) break;
    const ld step = value / slope;
    x -= step;
    if (std::fabs(step) <= 1e-17L * (1 + std::fabs(x))) {
      converged = true;
      break;
    }
  }
  eval(x, value, slope, scale);
  // Round-off floor: near multiple roots Newton stalls at this level.
  if (!converged && std::fabs(value) <= 64 * std::numeric_limits<double>::epsilon() * scale) {
    converged = true;
  }
  return {static_cast<double>(x), static_cast<double>(std::fabs(value)), converged};
}

}  // namespace afpp::poly
