#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ulsq/errors.hpp"

namespace ulsq {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n);
  /// Validating constructor: size must match and every entry must be finite.
  static DenseMatrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Compact Householder factorization: reflectors stored below the diagonal,
/// R on and above it.
struct QrFactorization {
  DenseMatrix qr;
  std::vector<double> reflector_head;  // leading entry of each reflector
};

QrFactorization householder_qr(DenseMatrix a);

/// Upper-triangular factor as a cols x cols matrix (for diagnostics/tests).
DenseMatrix r_factor(const QrFactorization& f);

/// Solves min ||D z - b||_2 for m >= N via Householder QR. Diagonal entries
/// of R below 1e-13 * max|R_ii| raise RankDeficientError with the column.
std::vector<double> qr_least_squares(const DenseMatrix& d, std::span<const double> b);

/// A = D^T D, exactly symmetric by construction.
DenseMatrix gram(const DenseMatrix& d);

/// Solves A z = f for symmetric positive definite A by Cholesky.
std::vector<double> cholesky_solve(const DenseMatrix& a, std::span<const double> f);

inline constexpr double kCondSentinel = 1e300;

struct SpectralDiagnostics {
  std::vector<double> eigenvalues;  // ascending
  double cond = 1.0;                // lambda_max / lambda_min, kCondSentinel if clipped
  double dist_to_identity = 0.0;    // max_i |lambda_i - 1|
};

struct EigenSystem {
  std::vector<double> eigenvalues;  // ascending
  DenseMatrix vectors;              // columns are eigenvectors; empty unless requested
};

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm falls below
/// 1e-14 * ||A||_F (at most 50 sweeps, then ConvergenceError).
EigenSystem jacobi_eigensystem(const DenseMatrix& a, bool accumulate_vectors);

SpectralDiagnostics sym_eigs(const DenseMatrix& a);

enum class QuadratureWeight {
  GaussHermite,   // weight e^{-y^2} on R, total mass sqrt(pi)
  GaussLaguerre,  // weight e^{-y} on R+, total mass 1
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights from the eigensystem of the symmetric Jacobi matrix of
/// the weight's orthonormal family.
QuadratureRule golub_welsch(int n, QuadratureWeight weight);

}  // namespace ulsq
