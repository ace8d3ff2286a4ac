#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regbf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown names, malformed expressions, invalid parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ConfigError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Arguments outside a formula's domain of validity.
class DomainError : public Error {
 public:
  using Error::Error;
};

class OutOfChartError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DetectionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace regbf
