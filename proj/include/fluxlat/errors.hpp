#pragma once

#include <stdexcept>
#include <string>

namespace fluxlat {

/// Bad physical input: charge constraints, parity rules, malformed configs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A basis or matrix would exceed the configured size guard.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solve did not reach the requested residual.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failures while reading configs or writing artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fluxlat
