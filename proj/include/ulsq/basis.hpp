#pragma once

#include <span>
#include <vector>

#include "ulsq/multi_index.hpp"

namespace ulsq {

enum class BasisFamily {
  HermitePoly,   // orthonormal under e^{-y^2} on R
  HermiteFunc,   // e^{-y^2/2} H_k(y), orthonormal under Lebesgue on R
  LaguerrePoly,  // orthonormal under e^{-y} on R+
  LaguerreFunc,  // e^{-y/2} L_k(y), orthonormal under Lebesgue on R+
};

bool is_laguerre(BasisFamily family);
bool is_function_variant(BasisFamily family);
const char* family_name(BasisFamily family);

/// One-dimensional evaluations. The function variants run the recurrence on
/// premultiplied values, so large arguments underflow to zero instead of
/// overflowing through the polynomial factor.
double eval_hermite_poly(int k, double y);
double eval_hermite_func(int k, double y);
double eval_laguerre_poly(int k, double y);
double eval_laguerre_func(int k, double y);

/// Fills out[0..kmax] with the orders 0..kmax at a single point, sharing the
/// three-term recurrence across the whole sequence.
void eval_sequence(BasisFamily family, int kmax, double y, std::span<double> out);

/// Tensorized basis specification: family, index set, and per-dimension
/// dilation factors alpha (all ones means the unscaled basis). Basis entry n
/// evaluates to prod_i phi_{n_i}(alpha_i * y_i).
class BasisSpec {
 public:
  BasisSpec(BasisFamily family, IndexSet indices, std::vector<double> alpha);
  static BasisSpec unscaled(BasisFamily family, IndexSet indices);

  BasisFamily family() const { return family_; }
  const IndexSet& indices() const { return indices_; }
  const std::vector<double>& alpha() const { return alpha_; }
  int dim() const { return indices_.dim(); }
  std::size_t size() const { return indices_.size(); }

 private:
  BasisFamily family_;
  IndexSet indices_;
  std::vector<double> alpha_;
};

/// Evaluates one design-matrix row (all basis entries at one point) in the
/// canonical index order. Reuses internal per-dimension buffers, so keep one
/// evaluator per thread when filling a matrix.
class BasisRowEvaluator {
 public:
  explicit BasisRowEvaluator(const BasisSpec& spec);
  void eval(std::span<const double> point, std::span<double> row) const;

 private:
  const BasisSpec* spec_;
  mutable std::vector<double> values_;  // (kmax_i + 1) values per dimension, packed
  std::vector<std::size_t> offsets_;
};

std::vector<double> eval_basis_row(const BasisSpec& spec, std::span<const double> point);

/// Radius beyond which the first K Hermite functions are numerically dead;
/// used to bound audit grids and quadrature windows.
double hermite_support_bound(int K);

/// Tail-domination radius: |H~_k(y)| <= |y|^{-3/2} for all k < K once |y| > tau.
struct TailConstant {
  int basis_count;
  double tau;
};

/// Smallest radius on a step-0.01 audit grid with the tail-domination
/// property, re-verified on a 10x finer grid before returning.
TailConstant estimate_tau(int K);

}  // namespace ulsq
