#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dynreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector2 = Eigen::Vector2d;

// Argument outside the domain an operation is defined on (box, length, sign).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite input or arithmetic breakdown.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method stopped before meeting its tolerance. Carries the best
// iterate found so far so callers can inspect or recover.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Vector best_iterate, double residual)
      : std::runtime_error(what), best_(std::move(best_iterate)), residual_(residual) {}

  const Vector& best_iterate() const { return best_; }
  double residual() const { return residual_; }

 private:
  Vector best_;
  double residual_;
};

}  // namespace dynreg
