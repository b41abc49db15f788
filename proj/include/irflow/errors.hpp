#pragma once

#include <stdexcept>
#include <string>

namespace irflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A requested basis or dense object would exceed the configured budget.
class SizeError : public Error {
 public:
  SizeError(const std::string& what, double would_be_dim)
      : Error(what), would_be_dim_(would_be_dim) {}
  double would_be_dim() const { return would_be_dim_; }

 private:
  double would_be_dim_;
};

/// An iterative or direct solve failed to reach the requested tolerance.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(what) {}
};

/// Operands live on incompatible spaces.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A run configuration failed validation.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace irflow
