#ifndef SATORIS_ERRORS_HPP
#define SATORIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace satoris {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands have incompatible shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its documented domain (rank, fraction, weight...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input data is unusable: NaN/Inf, unparseable files, inconsistent datasets.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A metric cannot be computed (no held-out entries, degenerate truth).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A numerical kernel failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An optimization problem could not be solved to a usable point.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace satoris

#endif  // SATORIS_ERRORS_HPP
