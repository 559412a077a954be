#pragma once

#include <stdexcept>
#include <string>

namespace qcd {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input outside the mathematical domain of an operation (|z| > 1, p <= 1, ...).
struct DomainError : Error {
  using Error::Error;
};

// A stated precondition of an operation does not hold.
struct PreconditionError : Error {
  using Error::Error;
};

// Branch-sensitive operation (log, fractional power) applied to a series
// that vanishes somewhere on the sampled disk.
struct BranchError : Error {
  using Error::Error;
};

// Identically-zero series or zero constant term fed to an operation that
// cannot tolerate it.
struct DegenerateInputError : Error {
  using Error::Error;
};

// A zero sits too close to the sampling contour for the argument principle
// to be trustworthy.  Carries the offending angle.
struct ContourError : Error {
  ContourError(const std::string& what, double angle)
      : Error(what), offending_angle(angle) {}
  double offending_angle = 0.0;
};

// Requested deformation exceeds the Beltrami sup-norm policy cap.
struct BudgetError : Error {
  using Error::Error;
};

// An iteration did not converge within its budget.
struct ConvergenceError : Error {
  using Error::Error;
};

// The problem data violates a structural assumption of the algorithm
// (e.g. a Laurent coefficient that must be nonzero vanishes).
struct StructureError : Error {
  using Error::Error;
};

// A verified post-hoc contract of a computed result failed.
struct ContractViolation : Error {
  ContractViolation(const std::string& what, int contract)
      : Error(what), contract_index(contract) {}
  int contract_index = 0;
};

}  // namespace qcd
