#pragma once

#include <stdexcept>
#include <string>

namespace mbloch {

/// Physical parameters outside their domain (non-positive mass, negative damping, ...).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A formula was evaluated outside the region where it is real-valued.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Eigenmode transform is undefined (no coupling but finite detuning).
class DegenerateTransformError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Caller mixed incompatible representations, e.g. a lab-frame envelope passed
/// where a rotating-frame one is required.
class ContractError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Pulse sequence or scan request is malformed.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The requested model layer lacks the data it needs to run.
class ConfigurationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DivergenceError : public std::runtime_error {
public:
  DivergenceError(double time, const std::string& what)
      : std::runtime_error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}

  double time() const noexcept { return time_; }

private:
  double time_;
};

}  // namespace mbloch
