#include "ulsq/uq_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace ulsq {

namespace {
constexpr int kOdeRk4Steps = 2000;
constexpr int kRowRetryCap = 100000;
}  // namespace

double ode_solution(double t, double y, double beta) {
  if (!(t >= 0.0)) throw ContractError("ode_solution: t must be >= 0");
  if (!(y >= 0.0)) throw ContractError("ode_solution: y must be >= 0");
  return std::exp(-beta * y * t);
}

double ode_solution_rk4(double t, double y, double beta) {
  if (!(t >= 0.0)) throw ContractError("ode_solution_rk4: t must be >= 0");
  if (!(y >= 0.0)) throw ContractError("ode_solution_rk4: y must be >= 0");
  const double lambda = -beta * y;
  const double h = t / kOdeRk4Steps;
  double f = 1.0;
  for (int s = 0; s < kOdeRk4Steps; ++s) {
    const double k1 = lambda * f;
    const double k2 = lambda * (f + 0.5 * h * k1);
    const double k3 = lambda * (f + 0.5 * h * k2);
    const double k4 = lambda * (f + h * k3);
    f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return f;
}

double ode_qoi_reference(double t, double beta) {
  const double rate = 1.0 + 2.0 * beta * t;
  if (!(rate > 0.0))
    throw DivergentQoiError("ode_qoi_reference: integrand e^{-(1+2 beta t) y} diverges (1+2bt=" +
                            std::to_string(rate) + ")");
  return 1.0 / rate;
}

double laguerre_func_integral(int n) {
  if (n < 0) throw ContractError("laguerre_func_integral: n must be >= 0");
  return n % 2 == 0 ? 2.0 : -2.0;
}

double hermite_func_integral(int k) {
  if (k < 0) throw ContractError("hermite_func_integral: k must be >= 0");
  if (k % 2 == 1) return 0.0;  // odd integrand

  static std::mutex mutex;
  static std::vector<double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto ks = static_cast<std::size_t>(k);
  if (ks < cache.size()) return cache[ks];

  const int kmax = std::max(k, 16);
  const double y_max = 40.0;
  const double h = 1e-3;
  const auto n = static_cast<std::size_t>(std::llround(2.0 * y_max / h));
  std::vector<double> sums(static_cast<std::size_t>(kmax) + 1, 0.0);
  std::vector<double> values(static_cast<std::size_t>(kmax) + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double y = -y_max + static_cast<double>(i) * h;
    eval_sequence(BasisFamily::HermiteFunc, kmax, y, values);
    const double w = (i == 0 || i == n) ? 0.5 * h : h;
    for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += w * values[j];
  }
  cache.resize(sums.size());
  for (std::size_t j = 0; j < sums.size(); ++j) cache[j] = (j % 2 == 1) ? 0.0 : sums[j];
  return cache[ks];
}

double integrate_expansion(const BasisSpec& spec, std::span<const double> coefficients) {
  if (coefficients.size() != spec.size())
    throw ContractError("integrate_expansion: coefficient count mismatch");
  if (!is_function_variant(spec.family()))
    throw ContractError("integrate_expansion: polynomial variants are not Lebesgue-integrable");

  double jacobian = 1.0;
  for (double a : spec.alpha()) jacobian /= a;

  const auto& indices = spec.indices().indices();
  double total = 0.0;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    double prod = 1.0;
    for (int i = 0; i < spec.dim(); ++i) {
      const int order = indices[j][i];
      prod *= spec.family() == BasisFamily::LaguerreFunc ? laguerre_func_integral(order)
                                                         : hermite_func_integral(order);
    }
    total += coefficients[j] * prod;
  }
  return total * jacobian;
}

QoIResult ode_qoi_lsq(const OdeModel& model, int q, const SamplingPlan& plan, double L,
                      const ScalingRule& rule, std::uint64_t seed, bool black_box) {
  const double reference = ode_qoi_reference(model.t, model.beta);  // may throw

  IndexSet indices = build_index_set(SpaceKind::TotalDegree, q, 1);
  const std::size_t m = plan.sample_count(indices.size());
  SampleSet raw = sample(DistributionSpec::mapped({1, L}), m, 1, seed);
  std::vector<double> alpha = select_scaling(raw, rule);
  SampleSet points = compress_samples(raw, alpha);

  std::vector<double> values(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double y = points.at(k, 0);
    const double f = black_box ? ode_solution_rk4(model.t, y, model.beta)
                               : ode_solution(model.t, y, model.beta);
    values[k] = std::exp(-y) * f * f;
  }

  BasisSpec spec(BasisFamily::LaguerreFunc, std::move(indices), alpha);
  Fit f = fit(spec, points, values, Solver::QR);

  QoIResult result;
  result.approx = integrate_expansion(f.spec, f.coefficients);
  result.reference = reference;
  result.abs_error = std::abs(result.approx - result.reference);
  result.meta = QoIMetadata{q, m, L, alpha, seed, f.diagnostics.cond, 0.0};
  return result;
}

double elliptic_exact_single(double c, double y, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ContractError("elliptic_exact_single: x must be in [0,1]");
  const double pi = std::numbers::pi;
  return std::exp(-c * y) * std::sin(pi * x) / (pi * pi);
}

double elliptic_qoi_single_reference(double c, double x0) {
  if (!(x0 > 0.0 && x0 < 1.0))
    throw ContractError("elliptic_qoi_single_reference: x0 must be in (0,1)");
  const double pi = std::numbers::pi;
  const double s = std::sin(pi * x0);
  return std::sqrt(2.0 * pi) * std::exp(2.0 * c * c) * s * s / (pi * pi * pi * pi);
}

EllipticSolution::EllipticSolution(std::vector<double> nodal, int n_elems)
    : nodal_(std::move(nodal)), n_elems_(n_elems) {}

double EllipticSolution::at(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw ContractError("EllipticSolution::at: x must be in [0,1]");
  const double h = 1.0 / n_elems_;
  auto e = static_cast<std::size_t>(x * n_elems_);
  e = std::min(e, static_cast<std::size_t>(n_elems_ - 1));
  const double local = (x - static_cast<double>(e) * h) / h;
  return (1.0 - local) * nodal_[e] + local * nodal_[e + 1];
}

EllipticSolution elliptic_solve_fem(const std::function<double(double)>& a_of_x, int n_elems) {
  if (n_elems < 2) throw ContractError("elliptic_solve_fem: need n_elems >= 2");
  const auto n = static_cast<std::size_t>(n_elems);
  const double h = 1.0 / n_elems;
  const double pi = std::numbers::pi;

  std::vector<double> a_mid(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double xm = (static_cast<double>(e) + 0.5) * h;
    a_mid[e] = a_of_x(xm);
    if (!(a_mid[e] > kEllipticityFloor))
      throw EllipticityError(a_mid[e], xm,
                             "elliptic_solve_fem: coefficient " + std::to_string(a_mid[e]) +
                                 " at x=" + std::to_string(xm) + " is below the admissible floor");
  }

  // Interior unknowns u_1..u_{n-1}; tridiagonal stiffness with midpoint
  // coefficients and a two-point Gauss load.
  const std::size_t interior = n - 1;
  std::vector<double> diag(interior, 0.0), lower(interior, 0.0), upper(interior, 0.0),
      rhs(interior, 0.0);
  const double gauss_offset = 0.5 / std::numbers::sqrt3;
  for (std::size_t e = 0; e < n; ++e) {
    const double k = a_mid[e] / h;
    const double x_left = static_cast<double>(e) * h;
    const double xg1 = x_left + (0.5 - gauss_offset) * h;
    const double xg2 = x_left + (0.5 + gauss_offset) * h;
    // Load contributions: int f phi over the element, phi linear hat pieces.
    const double f1 = std::sin(pi * xg1);
    const double f2 = std::sin(pi * xg2);
    const double load_left = 0.5 * h * (f1 * (1.0 - (0.5 - gauss_offset)) +
                                        f2 * (1.0 - (0.5 + gauss_offset)));
    const double load_right = 0.5 * h * (f1 * (0.5 - gauss_offset) + f2 * (0.5 + gauss_offset));

    const std::size_t left = e;    // global node index e
    const std::size_t right = e + 1;
    if (left >= 1) {
      diag[left - 1] += k;
      rhs[left - 1] += load_left;
    }
    if (right <= interior) {
      diag[right - 1] += k;
      rhs[right - 1] += load_right;
    }
    if (left >= 1 && right <= interior) {
      upper[left - 1] -= k;
      lower[right - 1] -= k;
    }
  }

  // Thomas algorithm.
  std::vector<double> c_prime(interior, 0.0), d_prime(interior, 0.0);
  c_prime[0] = upper[0] / diag[0];
  d_prime[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < interior; ++i) {
    const double denom = diag[i] - lower[i] * c_prime[i - 1];
    c_prime[i] = upper[i] / denom;
    d_prime[i] = (rhs[i] - lower[i] * d_prime[i - 1]) / denom;
  }
  std::vector<double> u(n + 1, 0.0);
  u[interior] = d_prime[interior - 1];
  for (std::size_t i = interior - 1; i-- > 0;) {
    u[i + 1] = d_prime[i] - c_prime[i] * u[i + 2];
  }
  return EllipticSolution(std::move(u), n_elems);
}

double three_param_coefficient(double x, std::span<const double> y) {
  if (y.size() != 3) throw ContractError("three_param_coefficient: need three parameters");
  const double pi = std::numbers::pi;
  return y[0] + 0.5 * (y[1] * std::cos(pi * x) + y[2] * std::sin(pi * x));
}

namespace {

double squared_weight(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return std::exp(-0.5 * s);
}

double solve_u_squared(const EllipticModel& model, std::span<const double> y) {
  if (model.coefficient == EllipticModel::Coefficient::SingleParam) {
    const double rate = std::exp(model.c * y[0]);
    const double u = elliptic_solve_fem([&](double) { return rate; }, model.n_elems).at(model.x0);
    return u * u;
  }
  const double u =
      elliptic_solve_fem([&](double x) { return three_param_coefficient(x, y); }, model.n_elems)
          .at(model.x0);
  return u * u;
}

int model_dim(const EllipticModel& model) {
  return model.coefficient == EllipticModel::Coefficient::SingleParam ? 1 : 3;
}

bool coefficient_admissible(const EllipticModel& model, std::span<const double> y) {
  if (model.coefficient == EllipticModel::Coefficient::SingleParam) return true;
  const double h = 1.0 / model.n_elems;
  for (int e = 0; e < model.n_elems; ++e) {
    const double xm = (e + 0.5) * h;
    if (!(three_param_coefficient(xm, y) > kEllipticityFloor)) return false;
  }
  return true;
}

}  // namespace

QoIResult elliptic_qoi_lsq(const EllipticModel& model, int q, const SamplingPlan& plan, double L,
                           std::uint64_t seed, std::optional<double> reference_override) {
  if (!(model.x0 > 0.0 && model.x0 < 1.0))
    throw ContractError("elliptic_qoi_lsq: x0 must be in (0,1)");
  const int d = model_dim(model);
  IndexSet indices = build_index_set(SpaceKind::TotalDegree, q, d);
  const std::size_t m = plan.sample_count(indices.size());
  const DistributionSpec dist = DistributionSpec::mapped({0, L});

  // Rows come from per-row streams so rejected draws are replaced
  // deterministically regardless of evaluation order.
  SampleSet points;
  points.m = m;
  points.d = static_cast<std::size_t>(d);
  points.spec = dist;
  points.seed = seed;
  points.points.resize(m * points.d);
  std::size_t rejected = 0;
  for (std::size_t row = 0; row < m; ++row) {
    PointStream stream(dist, points.d, derive_trial_seed(seed, row));
    std::span<double> out(points.points.data() + row * points.d, points.d);
    int attempts = 0;
    for (;;) {
      stream.next_row(out);
      if (coefficient_admissible(model, out)) break;
      ++rejected;
      if (++attempts >= kRowRetryCap) {
        const double rate = static_cast<double>(rejected) / static_cast<double>(rejected + row + 1);
        throw SampleRejectionError(rate,
                                   "elliptic_qoi_lsq: resampling budget exhausted at row " +
                                       std::to_string(row));
      }
    }
  }
  const double rejection_rate =
      static_cast<double>(rejected) / static_cast<double>(rejected + m);

  std::vector<double> values(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::span<const double> y = points.row(k);
    values[k] = squared_weight(y) * solve_u_squared(model, y);
  }

  BasisSpec spec = BasisSpec::unscaled(BasisFamily::HermiteFunc, std::move(indices));
  Fit f = fit(spec, points, values, Solver::QR);

  QoIResult result;
  result.approx = integrate_expansion(f.spec, f.coefficients);
  if (reference_override) {
    result.reference = *reference_override;
  } else {
    result.reference = model.coefficient == EllipticModel::Coefficient::SingleParam
                           ? elliptic_qoi_single_reference(model.c, model.x0)
                           : reference_qoi_tensor_quad(model);
  }
  result.abs_error = std::abs(result.approx - result.reference);
  result.meta = QoIMetadata{q, m, L, f.spec.alpha(), seed, f.diagnostics.cond, rejection_rate};
  return result;
}

namespace {

/// One tensor-quadrature pass at a fixed level. Nodes where the coefficient
/// is inadmissible carry an undefined model and contribute zero.
double tensor_quad_level(const EllipticModel& model, int nodes_per_dim) {
  QuadratureRule rule = golub_welsch(nodes_per_dim, QuadratureWeight::GaussHermite);
  const double scale = std::numbers::sqrt2;
  const int d = model_dim(model);

  if (d == 1) {
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double y = scale * rule.nodes[i];
      total += rule.weights[i] * solve_u_squared(model, std::span<const double>(&y, 1));
    }
    return scale * total;
  }

  double total = 0.0;
  std::array<double, 3> y{};
  for (std::size_t i0 = 0; i0 < rule.nodes.size(); ++i0) {
    y[0] = scale * rule.nodes[i0];
    for (std::size_t i1 = 0; i1 < rule.nodes.size(); ++i1) {
      y[1] = scale * rule.nodes[i1];
      for (std::size_t i2 = 0; i2 < rule.nodes.size(); ++i2) {
        y[2] = scale * rule.nodes[i2];
        if (!coefficient_admissible(model, y)) continue;
        total += rule.weights[i0] * rule.weights[i1] * rule.weights[i2] *
                 solve_u_squared(model, y);
      }
    }
  }
  return scale * scale * scale * total;
}

}  // namespace

double reference_qoi_tensor_quad(const EllipticModel& model, int nodes_per_dim) {
  if (nodes_per_dim < 2 || nodes_per_dim + 5 > 40)
    throw ContractError("reference_qoi_tensor_quad: need 2 <= nodes_per_dim <= 35");
  const double coarse = tensor_quad_level(model, nodes_per_dim);
  const double fine = tensor_quad_level(model, nodes_per_dim + 5);
  if (std::abs(fine - coarse) > 1e-8 * std::abs(fine))
    throw ConvergenceError("reference_qoi_tensor_quad: levels " + std::to_string(nodes_per_dim) +
                           " and " + std::to_string(nodes_per_dim + 5) +
                           " disagree: " + std::to_string(coarse) + " vs " + std::to_string(fine));
  return fine;
}

}  // namespace ulsq
