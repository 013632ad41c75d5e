#pragma once

#include <stdexcept>
#include <string>

namespace iit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions between images, planes or matrices.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (even window, negative weight, ...).
class ParamError : public Error {
 public:
  using Error::Error;
};

// Invalid pixel data (non-finite values, out-of-range intensities).
class ImageError : public Error {
 public:
  using Error::Error;
};

// File decode/encode failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Singular local system (LLE with epsilon = 0 on a degenerate patch).
class SingularError : public Error {
 public:
  using Error::Error;
};

}  // namespace iit
