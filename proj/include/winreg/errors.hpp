#pragma once

#include <stdexcept>
#include <string>

namespace winreg {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class JointNullSpaceError : public Error {
 public:
  JointNullSpaceError() : Error("joint null space nonempty") {}
};

class NotDiagonalizableError : public Error {
 public:
  NotDiagonalizableError() : Error("kernel not diagonalizable by DCT") {}
};

class EmptyWindowError : public Error {
 public:
  explicit EmptyWindowError(const std::string& detail)
      : Error("empty window: " + detail) {}
};

class SeparableFormError : public Error {
 public:
  SeparableFormError() : Error("separable form invalid for overlapping windows") {}
};

// Raised when 1 - trace/m (or a windowed analogue) collapses to zero.
class SaturatedTraceError : public Error {
 public:
  explicit SaturatedTraceError(const std::string& what) : Error(what) {}
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace winreg
