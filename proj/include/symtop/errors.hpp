#pragma once

#include <stdexcept>
#include <string>

namespace symtop {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quantum numbers or physical parameters outside their valid domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Unknown units, malformed configuration or preset files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A pulse cannot be synthesized for the requested design.
class DesignError : public Error {
 public:
  using Error::Error;
};

/// Population reached the top of the truncated J ladder.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// The time stepper lost unitarity beyond the accepted budget.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// A trace is empty or too short for extremum extraction.
class HorizonError : public Error {
 public:
  using Error::Error;
};

}  // namespace symtop
