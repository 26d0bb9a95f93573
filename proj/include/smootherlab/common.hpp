#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace smootherlab {

// Row-major so that one observation (or one weight vector) is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using IndexVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;

using Seed = std::uint64_t;

/// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value. Exit code 1 at the CLI.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class FormatError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Inputs that are individually well-formed but disagree with each other.
class ConsistencyError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// A sweep schedule or grid point that cannot be fitted.
class ValidationError : public ArgumentError {
 public:
  ValidationError(std::size_t point_index, const std::string& what)
      : ArgumentError("schedule point " + std::to_string(point_index) + ": " + what),
        point_index_(point_index) {}

  std::size_t point_index() const noexcept { return point_index_; }

 private:
  std::size_t point_index_;
};

/// A study precondition that the supplied models violate.
class PreconditionError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Numerical failure during fitting. Exit code 2 at the CLI.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public NumericalError {
 public:
  SingularityError(double singular_value, double tolerance)
      : NumericalError(describe(singular_value, tolerance)),
        singular_value_(singular_value) {}

  double singular_value() const noexcept { return singular_value_; }

 private:
  static std::string describe(double value, double tolerance) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "design matrix is rank deficient: singular value %.6g <= tolerance %.6g",
                  value, tolerance);
    return buf;
  }

  double singular_value_;
};

}  // namespace smootherlab
