#pragma once

#include <stdexcept>
#include <string>

namespace robin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameter (radii, resolutions, tolerances, noise levels).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Field or data that does not match its mesh, or is otherwise malformed.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A mesh that violates the boundary-tagging or orientation invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A tagged boundary component that is not a single closed loop.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Degenerate element encountered during assembly.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Robin coefficient outside the admissible set (some value <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Sparse factorization failed.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Bordered system is singular: the principal eigenvalue is not simple at the discrete level.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Linear solve finished but its residual is above tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace robin
