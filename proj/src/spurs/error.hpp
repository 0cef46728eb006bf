#pragma once

#include <stdexcept>
#include <string>

namespace spurs {

// Exit-code classes shared by the C API and the CLI.
enum class ErrorKind : int {
  internal = 1,
  validation = 2,
  numerical = 3,
  io = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

// Sample outside the grid extent, or a footprint clipped away entirely.
struct OutOfExtentError : ValidationError {
  using ValidationError::ValidationError;
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

struct FactorizationError : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateGeometryError : NumericalError {
  using NumericalError::NumericalError;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

struct ChecksumError : IoError {
  using IoError::IoError;
};

}  // namespace spurs
