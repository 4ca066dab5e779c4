#pragma once

#include <stdexcept>
#include <string>

namespace gms {

/// Base class for every error raised by the solver suite.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidMetricError : public Error {
 public:
  using Error::Error;
};

/// Cochain degree mismatch or an operator applied past the top degree.
class DegreeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its cap. Carries the last residual it saw.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Should never fire for the convex models shipped here.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// |c| at or beyond the critical constant of the closed-form family.
class SupercriticalError : public Error {
 public:
  using Error::Error;
};

/// The requested cohomology scale admits no smooth solution.
class NoSolutionError : public Error {
 public:
  using Error::Error;
};

class PrecisionError : public Error {
 public:
  using Error::Error;
};

class ModelDomainError : public Error {
 public:
  using Error::Error;
};

/// Configuration problems. `path` names the offending field (e.g. "metric").
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace gms
