#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ulsq/basis.hpp"
#include "ulsq/linalg.hpp"
#include "ulsq/sampling.hpp"

namespace ulsq {

enum class PlanRule { Linear, Quadratic };

/// Sample-count schedule m(N) = ceil(c N) or ceil(c N^2), lifted to N+1 when
/// the formula does not leave an overdetermined system.
struct SamplingPlan {
  PlanRule rule = PlanRule::Linear;
  double c = 1.0;

  std::size_t sample_count(std::size_t n_basis) const;
};

enum class ScalingKind { None, Maximum, Quantile };

/// Scaling-factor selection rule. support_radius is the radius M beyond
/// which the target is numerically zero; mu in (0,1] keeps the floor(mu*m)
/// smallest absolute values and drops the rest as outliers.
struct ScalingRule {
  ScalingKind kind = ScalingKind::None;
  double support_radius = 1.0;
  double mu = 0.98;

  static ScalingRule none() { return {ScalingKind::None, 1.0, 1.0}; }
  static ScalingRule maximum(double m) { return {ScalingKind::Maximum, m, 1.0}; }
  static ScalingRule quantile(double m, double mu) { return {ScalingKind::Quantile, m, mu}; }
};

/// Per-dimension scaling factors from the order statistics of |y_i|.
std::vector<double> select_scaling(const SampleSet& samples, const ScalingRule& rule);

/// Returns a copy of the samples with coordinate i divided by alpha_i, which
/// places the points inside the target's effective support. Distribution
/// provenance is preserved.
SampleSet compress_samples(const SampleSet& samples, std::span<const double> alpha);

/// Design matrix D_kj = Phi_j(alpha o y_k), columns in canonical index order.
DenseMatrix assemble_design(const BasisSpec& spec, const SampleSet& samples);

enum class Solver { QR, Cholesky };

struct Fit {
  BasisSpec spec;
  std::vector<double> coefficients;
  SampleSet samples;
  SpectralDiagnostics diagnostics;  // of the Gram matrix D^T D
  double residual_norm = 0.0;
  Solver solver = Solver::QR;

  /// Sum of coefficients times basis entries at one point.
  double evaluate(std::span<const double> point) const;
};

/// Discrete least-squares fit of the given values at the sample points.
Fit fit(const BasisSpec& spec, const SampleSet& samples, std::span<const double> values,
        Solver solver = Solver::QR);

using TargetFn = std::function<double(std::span<const double>)>;

inline constexpr std::uint64_t kDefaultEvalSeed = 0x45564c4752494421ull;

/// Maximum deviation between the fitted expansion and the target over n_eval
/// points drawn from the fit's sampling distribution with a fixed seed.
double linf_error(const Fit& f, const TargetFn& target, std::size_t n_eval = 4000,
                  std::uint64_t eval_seed = kDefaultEvalSeed);

/// Expected Gram matrix of the first K Hermite functions under the
/// logarithmic map with parameter L: entries
/// int (1 - tanh^2(y/L)) H~_i(y) H~_j(y) dy by composite quadrature.
DenseMatrix expected_gram(int K, double L);

}  // namespace ulsq
