#pragma once

#include <stdexcept>
#include <string>

namespace qecgrad {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or size problems: mismatched operands, non power-of-two lengths,
// dimensions past the configured maximum.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Inputs outside a documented range (probabilities, learning rates, names).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Non-finite values, non-PSD matrices, rank deficiency.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed code, config, or report files.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace qecgrad
