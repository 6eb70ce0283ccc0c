#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of a function (e.g. ω ≤ 0 for a PSD).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A parameter record violates its invariants. `field()` carries the dotted path of the
/// offending field when known, e.g. "cavity.input_transmissivity_ppm".
class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string &message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  explicit ValidationError(const std::string &message) : Error(message) {}

  const std::string &field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Input data carries no usable information (e.g. a spectrum without a resonance peak).
class DegenerateDataError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace optomech
