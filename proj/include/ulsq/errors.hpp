#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ulsq {

/// Requested object exceeds the representable or addressable size.
class CapacityError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// An argument violates a documented precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the natural domain of a basis family or mapping.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative numerical process did not reach its stopping criterion.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares matrix is numerically rank deficient.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(std::size_t column, const std::string& what)
      : std::runtime_error(what), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Cholesky factorization hit a non-positive pivot.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(std::size_t pivot, const std::string& what)
      : std::runtime_error(what), pivot_(pivot) {}
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

/// The requested quantity of interest is a divergent integral.
class DivergentQoiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coefficient sample makes the elliptic model ill-posed.
class EllipticityError : public std::runtime_error {
 public:
  EllipticityError(double min_coefficient, double location, const std::string& what)
      : std::runtime_error(what), min_coefficient_(min_coefficient), location_(location) {}
  double min_coefficient() const { return min_coefficient_; }
  double location() const { return location_; }

 private:
  double min_coefficient_;
  double location_;
};

/// Resampling budget exhausted while rejecting ill-posed samples.
class SampleRejectionError : public std::runtime_error {
 public:
  SampleRejectionError(double rejection_rate, const std::string& what)
      : std::runtime_error(what), rejection_rate_(rejection_rate) {}
  double rejection_rate() const { return rejection_rate_; }

 private:
  double rejection_rate_;
};

}  // namespace ulsq
