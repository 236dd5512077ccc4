#pragma once

#include <stdexcept>
#include <string>

namespace screenlab {

// Base class for every error this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// A 0/0 corner where no finite value is defensible (e.g. PPV at zero
// prevalence with perfect specificity).
class IndeterminateForm : public DomainError {
 public:
  explicit IndeterminateForm(const std::string& what) : DomainError(what) {}
};

// Requested posterior cannot be reached by repeated testing.
class UnreachableTarget : public Error {
 public:
  explicit UnreachableTarget(const std::string& what) : Error(what) {}
};

// Monte Carlo run produced too few positive draws to estimate a rate.
class InsufficientPositives : public Error {
 public:
  explicit InsufficientPositives(const std::string& what) : Error(what) {}
};

// Summary requested over an empty trajectory.
class EmptyTrajectory : public Error {
 public:
  explicit EmptyTrajectory(const std::string& what) : Error(what) {}
};

}  // namespace screenlab
