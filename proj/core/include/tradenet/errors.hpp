#pragma once

#include <stdexcept>
#include <string>

namespace tradenet {

// Base class for all errors raised by the library. `error_class()` is the
// stable, machine-readable category printed by the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* error_class() const noexcept { return "error"; }
};

// An argument lies outside an operation's domain (non-incident trade, missing
// price, malformed partition, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "domain"; }
};

// An exhaustive enumeration would exceed its documented guard.
class CapacityError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "capacity"; }
};

// An operation was invoked in a state where it is undefined (e.g. reading
// executed trades off-equilibrium).
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "precondition"; }
};

}  // namespace tradenet
