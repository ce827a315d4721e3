#include "ulsq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace ulsq {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
  if (data.size() != rows * cols) throw ContractError("DenseMatrix: data size mismatch");
  for (double v : data) {
    if (!std::isfinite(v)) throw ContractError("DenseMatrix: non-finite entry");
  }
  DenseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  return m;
}

namespace {

double column_norm_below(const DenseMatrix& a, std::size_t col, std::size_t from) {
  double s = 0.0;
  for (std::size_t i = from; i < a.rows(); ++i) s += a(i, col) * a(i, col);
  return std::sqrt(s);
}

void check_symmetric(const DenseMatrix& a, const char* where) {
  if (a.rows() != a.cols()) throw ContractError(std::string(where) + ": matrix must be square");
  double max_abs = 0.0;
  double max_asym = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i; j < a.cols(); ++j) {
      max_abs = std::max(max_abs, std::abs(a(i, j)));
      max_asym = std::max(max_asym, std::abs(a(i, j) - a(j, i)));
    }
  }
  if (max_asym > 1e-12 * std::max(max_abs, 1e-300))
    throw ContractError(std::string(where) + ": matrix is not symmetric");
}

}  // namespace

QrFactorization householder_qr(DenseMatrix a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n || n == 0) throw ContractError("householder_qr: need m >= n >= 1");

  std::vector<double> head(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double norm_x = column_norm_below(a, k, k);
    if (norm_x == 0.0) {
      // Dead column: leave a zero reflector and a zero diagonal entry for the
      // rank check downstream.
      head[k] = 0.0;
      continue;
    }
    const double sign = a(k, k) >= 0.0 ? 1.0 : -1.0;
    const double v0 = a(k, k) + sign * norm_x;
    // Normalize the reflector so v = (1, a(k+1,k)/v0, ...); beta = v0/(sign*norm_x).
    for (std::size_t i = k + 1; i < m; ++i) a(i, k) /= v0;
    const double beta = sign * v0 / norm_x;
    head[k] = beta;
    a(k, k) = -sign * norm_x;  // R diagonal

    for (std::size_t j = k + 1; j < n; ++j) {
      double dot = a(k, j);
      for (std::size_t i = k + 1; i < m; ++i) dot += a(i, k) * a(i, j);
      dot *= beta;
      a(k, j) -= dot;
      for (std::size_t i = k + 1; i < m; ++i) a(i, j) -= dot * a(i, k);
    }
  }
  return QrFactorization{std::move(a), std::move(head)};
}

DenseMatrix r_factor(const QrFactorization& f) {
  const std::size_t n = f.qr.cols();
  DenseMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) r(i, j) = f.qr(i, j);
  return r;
}

std::vector<double> qr_least_squares(const DenseMatrix& d, std::span<const double> b) {
  const std::size_t m = d.rows();
  const std::size_t n = d.cols();
  if (b.size() != m) throw ContractError("qr_least_squares: rhs length mismatch");
  QrFactorization f = householder_qr(d);

  double max_diag = 0.0;
  for (std::size_t k = 0; k < n; ++k) max_diag = std::max(max_diag, std::abs(f.qr(k, k)));
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(f.qr(k, k)) < 1e-13 * max_diag)
      throw RankDeficientError(
          k, "qr_least_squares: rank-deficient design matrix at column " + std::to_string(k));
  }

  // Apply the reflectors to b, then back-substitute.
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (f.reflector_head[k] == 0.0) continue;
    double dot = y[k];
    for (std::size_t i = k + 1; i < m; ++i) dot += f.qr(i, k) * y[i];
    dot *= f.reflector_head[k];
    y[k] -= dot;
    for (std::size_t i = k + 1; i < m; ++i) y[i] -= dot * f.qr(i, k);
  }
  std::vector<double> z(n, 0.0);
  for (std::size_t kk = n; kk-- > 0;) {
    double s = y[kk];
    for (std::size_t j = kk + 1; j < n; ++j) s -= f.qr(kk, j) * z[j];
    z[kk] = s / f.qr(kk, kk);
  }
  return z;
}

DenseMatrix gram(const DenseMatrix& d) {
  const std::size_t m = d.rows();
  const std::size_t n = d.cols();
  DenseMatrix a(n, n);
  for (std::size_t k = 0; k < m; ++k) {
    std::span<const double> row = d.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double di = row[i];
      if (di == 0.0) continue;
      for (std::size_t j = i; j < n; ++j) a(i, j) += di * row[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  return a;
}

std::vector<double> cholesky_solve(const DenseMatrix& a, std::span<const double> f) {
  check_symmetric(a, "cholesky_solve");
  const std::size_t n = a.rows();
  if (f.size() != n) throw ContractError("cholesky_solve: rhs length mismatch");

  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0))
      throw NotPositiveDefiniteError(
          j, "cholesky_solve: non-positive pivot at index " + std::to_string(j));
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }

  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = f[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  std::vector<double> z(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * z[k];
    z[ii] = s / l(ii, ii);
  }
  return z;
}

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenSystem jacobi_eigensystem(const DenseMatrix& a_in, bool accumulate_vectors) {
  check_symmetric(a_in, "jacobi_eigensystem");
  const std::size_t n = a_in.rows();
  DenseMatrix a = a_in;
  DenseMatrix v = accumulate_vectors ? DenseMatrix::identity(n) : DenseMatrix();

  double norm_f = 0.0;
  for (double x : a.data()) norm_f += x * x;
  norm_f = std::sqrt(norm_f);
  const double tol = 1e-14 * std::max(norm_f, 1e-300);

  int sweep = 0;
  while (off_diagonal_norm(a) > tol) {
    if (++sweep > 50)
      throw ConvergenceError("jacobi_eigensystem: no convergence after 50 sweeps, off-norm " +
                             std::to_string(off_diagonal_norm(a)));
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double apj = a(p, j);
          const double aqj = a(q, j);
          a(p, j) = c * apj - s * aqj;
          a(q, j) = s * apj + c * aqj;
        }
        if (accumulate_vectors) {
          for (std::size_t i = 0; i < n; ++i) {
            const double vip = v(i, p);
            const double viq = v(i, q);
            v(i, p) = c * vip - s * viq;
            v(i, q) = s * vip + c * viq;
          }
        }
      }
    }
  }

  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = a(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return eigs[i] < eigs[j]; });

  EigenSystem out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = eigs[order[i]];
  if (accumulate_vectors) {
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

SpectralDiagnostics sym_eigs(const DenseMatrix& a) {
  EigenSystem es = jacobi_eigensystem(a, false);
  SpectralDiagnostics diag;
  diag.eigenvalues = std::move(es.eigenvalues);
  const double lambda_min = diag.eigenvalues.front();
  const double lambda_max = diag.eigenvalues.back();
  const double clip = std::max(1e-300, 1e-16 * std::abs(lambda_max));
  diag.cond = lambda_min <= clip ? kCondSentinel : lambda_max / lambda_min;
  diag.dist_to_identity = 0.0;
  for (double l : diag.eigenvalues)
    diag.dist_to_identity = std::max(diag.dist_to_identity, std::abs(l - 1.0));
  return diag;
}

namespace {

// Orthonormal value and derivative at one point; used to polish the
// eigenvalue nodes and to form weights with relative accuracy. The
// eigenvector-squared weight formula loses the tiny tail weights in the
// absolute rounding noise, while these value-based formulas keep them
// relatively accurate.
void hermite_value_derivative(int n, double y, double& value, double& derivative) {
  const double norm = std::pow(std::numbers::pi, -0.25);
  double prev = 0.0;
  double cur = norm;
  for (int k = 0; k < n; ++k) {
    const double next =
        y * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  value = cur;
  derivative = std::sqrt(2.0 * n) * prev;
}

void laguerre_value_derivative(int n, double y, double& value, double& derivative) {
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - y) * cur - k * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  value = cur;
  derivative = y == 0.0 ? -static_cast<double>(n) : n * (cur - prev) / y;
}

}  // namespace

QuadratureRule golub_welsch(int n, QuadratureWeight weight) {
  if (n < 1 || n > 128) throw ContractError("golub_welsch: need 1 <= n <= 128");
  const auto ns = static_cast<std::size_t>(n);
  DenseMatrix jacobi(ns, ns);
  const bool hermite = weight == QuadratureWeight::GaussHermite;
  if (hermite) {
    for (std::size_t k = 1; k < ns; ++k) {
      const double off = std::sqrt(static_cast<double>(k) / 2.0);
      jacobi(k - 1, k) = off;
      jacobi(k, k - 1) = off;
    }
  } else {
    for (std::size_t k = 0; k < ns; ++k) jacobi(k, k) = 2.0 * static_cast<double>(k) + 1.0;
    for (std::size_t k = 1; k < ns; ++k) {
      const double off = static_cast<double>(k);
      jacobi(k - 1, k) = off;
      jacobi(k, k - 1) = off;
    }
  }

  QuadratureRule rule;
  rule.nodes = jacobi_eigensystem(jacobi, false).eigenvalues;
  rule.weights.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    double& x = rule.nodes[i];
    double value = 0.0, derivative = 0.0;
    for (int iter = 0; iter < 8; ++iter) {
      if (hermite) {
        hermite_value_derivative(n, x, value, derivative);
      } else {
        laguerre_value_derivative(n, x, value, derivative);
      }
      const double step = value / derivative;
      x -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
    }
    if (hermite) {
      // w_i = 1 / (n * h_{n-1}(x_i)^2) in the orthonormal normalization
      double below, unused;
      hermite_value_derivative(n - 1, x, below, unused);
      rule.weights[i] = 1.0 / (n * below * below);
    } else {
      // w_i = x_i / ((n+1)^2 L_{n+1}(x_i)^2)
      double above, unused;
      laguerre_value_derivative(n + 1, x, above, unused);
      rule.weights[i] = x / (std::pow(static_cast<double>(n + 1) * above, 2));
    }
  }
  return rule;
}

}  // namespace ulsq
