#pragma once

#include <complex>
#include <span>
#include <vector>

namespace afpp::poly {

/// Horner evaluation; coefficients ordered constant-first.
double evaluate(std::span<const double> coeffs, double x) noexcept;
std::complex<double> evaluate(std::span<const double> coeffs, std::complex<double> z) noexcept;

/// Coefficients of the derivative, constant-first.
std::vector<double> derivative(std::span<const double> coeffs);

/// All complex roots of a polynomial (constant-first, leading coefficient
/// nonzero) from the eigenvalues of its companion matrix, each refined by a
/// few complex Newton steps on the polynomial itself.
std::vector<std::complex<double>> roots(std::span<const double> coeffs);

struct PolishResult {
  double root = 0.0;
  double residual = 0.0;
  bool converged = false;
};

/// Real Newton refinement, evaluated in extended precision.
PolishResult polish_real_root(std::span<const double> coeffs, double guess, int max_iter = 50);

}  // namespace afpp::poly
