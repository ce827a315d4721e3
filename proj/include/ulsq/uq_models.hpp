#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ulsq/least_squares.hpp"

namespace ulsq {

/// Exponential-decay model df/dt = -beta*y*f, f(0)=1, with a positive random
/// rate parameter y.
struct OdeModel {
  double beta = 1.5;
  double t = 1.0;
};

/// Closed-form solution e^{-beta*y*t}.
double ode_solution(double t, double y, double beta);

/// Fixed-step RK4 integration of the same model; stands in for an opaque
/// solver that must be called once per sample.
double ode_solution_rk4(double t, double y, double beta);

/// Exact second moment of the solution under the unit-rate exponential
/// density: 1/(1 + 2*beta*t). Throws DivergentQoiError when the integral
/// does not exist.
double ode_qoi_reference(double t, double beta);

/// int_0^inf L~_n(y) dy = 2*(-1)^n.
double laguerre_func_integral(int n);

/// J_k = int_R H~_k(y) dy, computed once by composite quadrature and cached;
/// odd orders are exactly zero by symmetry.
double hermite_func_integral(int k);

/// Lebesgue integral of an expansion in scaled basis functions:
/// sum_n c_n prod_i I_{n_i} / alpha_i. Function-variant families only.
double integrate_expansion(const BasisSpec& spec, std::span<const double> coefficients);

struct QoIMetadata {
  int q = 0;
  std::size_t m = 0;
  double L = 0.0;
  std::vector<double> alpha;
  std::uint64_t seed = 0;
  double cond = 1.0;
  double rejection_rate = 0.0;
};

struct QoIResult {
  double approx = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  QoIMetadata meta;
};

/// Second moment of the random ODE solution by a Laguerre-function
/// least-squares fit of e^{-y} f^2(t,y) at mapped (r=1) sample points.
QoIResult ode_qoi_lsq(const OdeModel& model, int q, const SamplingPlan& plan, double L,
                      const ScalingRule& rule, std::uint64_t seed, bool black_box = false);

/// Exact solution of -(e^{cy} u')' = sin(pi x), u(0)=u(1)=0.
double elliptic_exact_single(double c, double y, double x);

/// Closed form of int e^{-y^2/2} u^2(x0, y) dy for the single-parameter
/// coefficient: sqrt(2 pi) e^{2 c^2} sin^2(pi x0) / pi^4.
double elliptic_qoi_single_reference(double c, double x0);

/// Piecewise-linear solution on a uniform mesh with nodal values and a
/// linear interpolant.
class EllipticSolution {
 public:
  EllipticSolution(std::vector<double> nodal, int n_elems);
  double at(double x) const;
  const std::vector<double>& nodal() const { return nodal_; }

 private:
  std::vector<double> nodal_;
  int n_elems_;
};

/// Minimum admissible coefficient value; samples below are rejected.
inline constexpr double kEllipticityFloor = 1e-8;

/// P1 finite elements for -(a(x) u')' = sin(pi x) on [0,1] with homogeneous
/// Dirichlet data. The coefficient is evaluated at element midpoints and the
/// load integrated with two-point Gauss; the tridiagonal system is solved by
/// the Thomas algorithm. Throws EllipticityError when min a <= floor.
EllipticSolution elliptic_solve_fem(const std::function<double(double)>& a_of_x, int n_elems);

/// Affine three-parameter coefficient y0 + (y1 cos(pi x) + y2 sin(pi x))/2.
double three_param_coefficient(double x, std::span<const double> y);

struct EllipticModel {
  enum class Coefficient { SingleParam, ThreeParam };
  Coefficient coefficient = Coefficient::ThreeParam;
  double c = 1.0;  // SingleParam rate
  int n_elems = 256;
  double x0 = 0.5;
};

/// Weighted QoI int e^{-|y|^2/2} u^2(x0, y) dy by a Hermite-function fit of
/// the weighted squared solution at mapped (r=0) points. The three-parameter
/// coefficient can fail ellipticity; such draws are rejected and redrawn from
/// per-row streams. A precomputed reference value can be passed in to avoid
/// re-running the quadrature across a sweep.
QoIResult elliptic_qoi_lsq(const EllipticModel& model, int q, const SamplingPlan& plan, double L,
                           std::uint64_t seed, std::optional<double> reference_override = {});

/// Reference by tensorized Gauss rules adapted to the weight e^{-y^2/2}.
/// Levels nodes_per_dim and nodes_per_dim+5 must agree to 1e-8 relative.
double reference_qoi_tensor_quad(const EllipticModel& model, int nodes_per_dim = 20);

}  // namespace ulsq
