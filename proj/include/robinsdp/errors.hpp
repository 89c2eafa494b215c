#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace robinsdp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operands with incompatible dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a map (e.g. a non-positive coefficient).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mesh generation or finite element assembly failed.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// A linear solve or factorization failed.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The semidefinite program has no (strictly) feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// The barrier method ran out of Newton iterations.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> best_iterate)
      : Error(what), best_iterate_(std::move(best_iterate)) {}

  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }

 private:
  std::vector<double> best_iterate_;
};

}  // namespace robinsdp
