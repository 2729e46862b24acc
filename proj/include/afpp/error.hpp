#pragma once

#include <stdexcept>
#include <string>

namespace afpp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or arguments (CLI exit code 2).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Integration, root polishing or continuation broke down (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Optimal control target cannot be reached (CLI exit code 4).
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace afpp
