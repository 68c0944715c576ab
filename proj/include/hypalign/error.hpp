#pragma once

#include <stdexcept>
#include <string>

namespace hypalign {

/// Broad failure classes. They map one-to-one onto the C API status codes
/// and the CLI exit codes (1 usage, 2 data, 3 numerical).
enum class ErrorKind { Usage, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// Distance gradient requested at (numerically) coincident points.
class CoincidentPointsError : public NumericalError {
 public:
  CoincidentPointsError() : NumericalError("distance gradient undefined at coincident points") {}
};

// A mixture component whose M-step denominator vanished.
class DegenerateComponentError : public NumericalError {
 public:
  explicit DegenerateComponentError(int component)
      : NumericalError("degenerate mixture component " + std::to_string(component)),
        component_(component) {}
  int component() const noexcept { return component_; }

 private:
  int component_;
};

}  // namespace hypalign
