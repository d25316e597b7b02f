#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kinv {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A parameter lies outside its valid domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Zero vector (or equivalent) where a nonzero norm is required.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Both ReLU signals vanished, so the normalized kernel is undefined.
class DegenerateSignalError : public Error {
 public:
  using Error::Error;
};

// Rejection sampling ran out of attempts.
class SamplingExhaustedError : public Error {
 public:
  using Error::Error;
};

// Malformed file header or contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File payload is truncated or has the wrong length.
class LengthError : public Error {
 public:
  using Error::Error;
};

// A computation produced NaN or Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training loss became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : Error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace kinv
