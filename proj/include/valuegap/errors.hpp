#pragma once

#include <stdexcept>
#include <string>

namespace valuegap {

// Caller supplied an argument that violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce a trustworthy answer. Estimator
// failures in the experiment harness are caught at this level.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(const std::string& what, long rank, long required)
      : NumericalError(what + " (numerical rank " + std::to_string(rank) +
                       ", required " + std::to_string(required) + ")"),
        rank_(rank),
        required_(required) {}

  long rank() const { return rank_; }
  long required() const { return required_; }

 private:
  long rank_;
  long required_;
};

// A plug-in model whose discounted dynamics are not contracting.
class UnstableModelError : public NumericalError {
 public:
  UnstableModelError(const std::string& what, double radius)
      : NumericalError(what + " (spectral radius " + std::to_string(radius) + ")"),
        radius_(radius) {}

  double radius() const { return radius_; }

 private:
  double radius_;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace valuegap
