#pragma once

#include <stdexcept>
#include <string>

namespace hamel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The frame matrix is (numerically) singular at the evaluation point.
class SingularFrameError : public Error {
 public:
  using Error::Error;
};

/// A reduced mass matrix or multiplier system could not be factored.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Event location could not bracket or converge on the boundary.
class EventLocationError : public Error {
 public:
  using Error::Error;
};

/// The jump equations were called on a degenerate or receding configuration.
class JumpError : public Error {
 public:
  using Error::Error;
};

/// Too many impacts accumulated inside a single nominal step.
class ZenoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hamel
