#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace genlie {

// Base of every error thrown by the library. The CLI maps subclasses to exit
// codes: InputError -> 2, everything else -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: expression syntax, JSON schema, inconsistent options.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t position)
      : InputError(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A numeric evaluation left the domain of a function (log of a negative
// number, |artanh argument| >= 1, overflow to a non-finite value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnboundVariableError : public Error {
 public:
  explicit UnboundVariableError(const std::string& name)
      : Error("unbound variable '" + name + "'"), name_(name) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Jet order exceeds the order the jet space was configured with.
class JetOrderError : public Error {
 public:
  using Error::Error;
};

// Growth-class bookkeeping forbids the requested operation (e.g. composing
// with a function that is not tempered).
class ClassViolation : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed to reach its target (non-invertible map,
// blow-up of a flow, ill-conditioned fit, ...).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace genlie
