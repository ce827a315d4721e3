#include "ulsq/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ulsq {

std::size_t SamplingPlan::sample_count(std::size_t n_basis) const {
  if (!(c > 0.0)) throw ContractError("SamplingPlan: multiplier c must be positive");
  const double n = static_cast<double>(n_basis);
  const double raw = rule == PlanRule::Linear ? c * n : c * n * n;
  if (raw > 9.0e15) throw CapacityError("SamplingPlan: sample count too large");
  auto m = static_cast<std::size_t>(std::ceil(raw));
  if (m <= n_basis) m = n_basis + 1;
  return m;
}

std::vector<double> select_scaling(const SampleSet& samples, const ScalingRule& rule) {
  const std::size_t d = samples.d;
  if (rule.kind == ScalingKind::None) return std::vector<double>(d, 1.0);
  if (!(rule.support_radius > 0.0))
    throw ContractError("select_scaling: support radius M must be positive");

  std::size_t order = samples.m;  // Maximum rule: the largest order statistic
  if (rule.kind == ScalingKind::Quantile) {
    if (!(rule.mu > 0.0 && rule.mu <= 1.0))
      throw ContractError("select_scaling: mu must lie in (0, 1]");
    order = static_cast<std::size_t>(std::floor(rule.mu * static_cast<double>(samples.m)));
    if (order < 1) throw ContractError("select_scaling: floor(mu*m) must be >= 1");
  }

  std::vector<double> alpha(d, 1.0);
  std::vector<double> abs_col(samples.m);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < samples.m; ++i) abs_col[i] = std::abs(samples.at(i, j));
    std::nth_element(abs_col.begin(), abs_col.begin() + static_cast<std::ptrdiff_t>(order - 1),
                     abs_col.end());
    alpha[j] = abs_col[order - 1] / rule.support_radius;
    if (!(alpha[j] > 0.0))
      throw ContractError("select_scaling: order statistic is zero in dimension " +
                          std::to_string(j));
  }
  return alpha;
}

SampleSet compress_samples(const SampleSet& samples, std::span<const double> alpha) {
  if (alpha.size() != samples.d) throw ContractError("compress_samples: alpha size mismatch");
  SampleSet out = samples;
  for (std::size_t i = 0; i < samples.m; ++i)
    for (std::size_t j = 0; j < samples.d; ++j) out.points[i * samples.d + j] /= alpha[j];
  return out;
}

DenseMatrix assemble_design(const BasisSpec& spec, const SampleSet& samples) {
  if (samples.d != static_cast<std::size_t>(spec.dim()))
    throw ContractError("assemble_design: sample dimension does not match basis");
  DenseMatrix d(samples.m, spec.size());
  BasisRowEvaluator evaluator(spec);
  for (std::size_t k = 0; k < samples.m; ++k) evaluator.eval(samples.row(k), d.row(k));
  return d;
}

double Fit::evaluate(std::span<const double> point) const {
  std::vector<double> row = eval_basis_row(spec, point);
  double s = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) s += coefficients[j] * row[j];
  return s;
}

Fit fit(const BasisSpec& spec, const SampleSet& samples, std::span<const double> values,
        Solver solver) {
  const std::size_t n = spec.size();
  const std::size_t m = samples.m;
  if (values.size() != m) throw ContractError("fit: values length must equal sample count");
  if (m < n) throw ContractError("fit: need at least as many samples as basis functions");

  const std::string context = " (fit: family=" + std::string(family_name(spec.family())) +
                              ", N=" + std::to_string(n) + ", m=" + std::to_string(m) +
                              ", seed=" + std::to_string(samples.seed) + ")";
  DenseMatrix design = assemble_design(spec, samples);
  DenseMatrix a = gram(design);

  Fit result{spec, {}, samples, sym_eigs(a), 0.0, solver};
  try {
    if (solver == Solver::QR) {
      result.coefficients = qr_least_squares(design, values);
    } else {
      std::vector<double> rhs(n, 0.0);
      for (std::size_t k = 0; k < m; ++k) {
        std::span<const double> row = design.row(k);
        for (std::size_t j = 0; j < n; ++j) rhs[j] += row[j] * values[k];
      }
      result.coefficients = cholesky_solve(a, rhs);
    }
  } catch (const RankDeficientError& e) {
    throw RankDeficientError(e.column(), e.what() + context);
  } catch (const NotPositiveDefiniteError& e) {
    throw NotPositiveDefiniteError(e.pivot(), e.what() + context);
  }

  double rss = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    std::span<const double> row = design.row(k);
    double pred = 0.0;
    for (std::size_t j = 0; j < n; ++j) pred += row[j] * result.coefficients[j];
    const double r = pred - values[k];
    rss += r * r;
  }
  result.residual_norm = std::sqrt(rss);
  return result;
}

double linf_error(const Fit& f, const TargetFn& target, std::size_t n_eval,
                  std::uint64_t eval_seed) {
  if (n_eval < 1) throw ContractError("linf_error: n_eval must be >= 1");
  SampleSet grid = sample(f.samples.spec, n_eval, f.samples.d, eval_seed);
  BasisRowEvaluator evaluator(f.spec);
  std::vector<double> row(f.spec.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.m; ++k) {
    evaluator.eval(grid.row(k), row);
    double pred = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) pred += f.coefficients[j] * row[j];
    worst = std::max(worst, std::abs(pred - target(grid.row(k))));
  }
  return worst;
}

DenseMatrix expected_gram(int K, double L) {
  if (K < 1 || K > 64) throw ContractError("expected_gram: need 1 <= K <= 64");
  if (!(L > 0.0)) throw ContractError("expected_gram: L must be positive");

  // The integrand dies with the Hermite functions, so the window never needs
  // to extend past their support.
  const double y_max = std::min(20.0 * L, hermite_support_bound(K));
  const double target_step = 0.01;
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * y_max / target_step));
  const double h = 2.0 * y_max / static_cast<double>(n);

  const auto k = static_cast<std::size_t>(K);
  DenseMatrix a(k, k);
  std::vector<double> values(k);
  for (std::size_t i = 0; i <= n; ++i) {
    const double y = -y_max + static_cast<double>(i) * h;
    const double t = std::tanh(y / L);
    const double density = 1.0 - t * t;
    if (density == 0.0) continue;
    eval_sequence(BasisFamily::HermiteFunc, K - 1, y, values);
    const double w = (i == 0 || i == n) ? 0.5 * h : h;
    for (std::size_t p = 0; p < k; ++p) {
      const double vp = values[p] * density * w;
      if (vp == 0.0) continue;
      for (std::size_t q = p; q < k; ++q) a(p, q) += vp * values[q];
    }
  }
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = p + 1; q < k; ++q) a(q, p) = a(p, q);
  return a;
}

}  // namespace ulsq
