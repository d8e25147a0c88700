#pragma once

#include <stdexcept>
#include <string>

namespace darkstates {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid lattice, cavity, disorder or plan parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// LAPACK reported a failure (bad argument or no convergence).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Projected matrix dimension exceeds the configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace darkstates
