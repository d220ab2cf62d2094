#pragma once

#include <stdexcept>
#include <string>

namespace varistab {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class NoProjection : public Error {
 public:
  using Error::Error;
};

/// A grid sweep would enumerate more points than the configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A function value needed as a base point is infinite.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotOnGraph : public Error {
 public:
  using Error::Error;
};

/// The requested object lies outside the analytic catalog.
class Unsupported : public Error {
 public:
  using Error::Error;
};

class NoSolutionFound : public Error {
 public:
  using Error::Error;
};

/// A run configuration failed validation; the message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An output file could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace varistab
