#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace efp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, mismatched inputs or violated preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A run produced non-finite values.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::int64_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

/// Quadrature could not certify the requested tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}

  /// Smallest level-to-level difference reached before giving up.
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace efp
