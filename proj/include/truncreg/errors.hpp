#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace truncreg {

// Base class for failures the CLI maps onto exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Truncation-set grammar or interval-list validation failure.
struct GrammarError : Error {
  using Error::Error;
};

// Oracle-variant survival estimation called with mc_budget = 0.
struct ZeroBudget : Error {
  using Error::Error;
};

// Total truncated mass below the representable floor.
struct EmptyMass : Error {
  using Error::Error;
};

// Rejection sampler exhausted its attempt budget.
struct RejectionBudgetExceeded : Error {
  explicit RejectionBudgetExceeded(std::size_t attempts_)
      : Error("rejection sampling exceeded " + std::to_string(attempts_) +
              " attempts; survival probability too small for the budget"),
        attempts(attempts_) {}
  std::size_t attempts;
};

// Gram matrix rank deficient (even after one jitter retry).
struct SingularDesign : Error {
  using Error::Error;
};

// Matrix handed to a symmetric-only routine is not symmetric.
struct NotSymmetric : Error {
  using Error::Error;
};

// Matrix required to be positive definite has an eigenvalue <= 0.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// Survival lower bound a outside (0, 1).
struct InvalidSurvivalBound : Error {
  using Error::Error;
};

// Fewer samples than the three-way split requires.
struct TooFewSamples : Error {
  using Error::Error;
};

// OLS residual variance below 1e-12; the projection set would collapse.
struct DegenerateVariance : Error {
  using Error::Error;
};

// Generator could not collect the requested sample count within its budget.
struct WorldBudgetExceeded : Error {
  using Error::Error;
};

// Lyapunov solution too ill-conditioned to invert for the region shape.
struct SingularSigma : Error {
  using Error::Error;
};

}  // namespace truncreg
