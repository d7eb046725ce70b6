#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace riskpref {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: out-of-range values, unknown names, malformed payloads.
// `field` is a path such as "choices[3]" or "likert.health" when one applies.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string field = {})
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// State-machine violations (out-of-order or duplicate submissions).
class ConflictError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskpref
