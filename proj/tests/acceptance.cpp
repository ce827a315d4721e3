// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failing criteria. Each check pins its tolerances and seeds in place.
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ulsq/harness.hpp"

using namespace ulsq;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
  g_results.push_back({id, name, pass, detail});
  std::printf("[%2d] %s  %s  (%s)\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Orthonormality of all four families.
void criterion_orthonormality() {
  QuadratureRule gh = golub_welsch(64, QuadratureWeight::GaussHermite);
  QuadratureRule gl = golub_welsch(64, QuadratureWeight::GaussLaguerre);

  double worst_poly = 0.0;
  std::vector<double> row_i(21), row_j(21);
  auto poly_gram = [&](BasisFamily family, const QuadratureRule& rule) {
    for (int i = 0; i <= 20; ++i) {
      for (int j = i; j <= 20; ++j) {
        double s = 0.0;
        std::vector<double> values(21);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          eval_sequence(family, 20, rule.nodes[k], values);
          s += rule.weights[k] * values[static_cast<std::size_t>(i)] *
               values[static_cast<std::size_t>(j)];
        }
        worst_poly = std::max(worst_poly, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
    }
  };
  poly_gram(BasisFamily::HermitePoly, gh);
  poly_gram(BasisFamily::LaguerrePoly, gl);

  double worst_func = 0.0;
  auto func_gram = [&](BasisFamily family, double lo, double hi, std::size_t n) {
    std::vector<double> gram(21 * 21, 0.0);
    std::vector<double> values(21);
    const double h = (hi - lo) / static_cast<double>(n);
    for (std::size_t s = 0; s <= n; ++s) {
      eval_sequence(family, 20, lo + h * static_cast<double>(s), values);
      const double w = (s == 0 || s == n) ? 1.0 : (s % 2 ? 4.0 : 2.0);
      for (int i = 0; i <= 20; ++i)
        for (int j = i; j <= 20; ++j)
          gram[static_cast<std::size_t>(i) * 21 + static_cast<std::size_t>(j)] +=
              w * values[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i <= 20; ++i)
      for (int j = i; j <= 20; ++j)
        worst_func = std::max(
            worst_func,
            std::abs(gram[static_cast<std::size_t>(i) * 21 + static_cast<std::size_t>(j)] * h /
                         3.0 -
                     (i == j ? 1.0 : 0.0)));
  };
  func_gram(BasisFamily::HermiteFunc, -40.0, 40.0, 80000);
  func_gram(BasisFamily::LaguerreFunc, 0.0, 400.0, 400000);

  record(1, "orthonormality of polynomial and function bases",
         worst_poly < 1e-10 && worst_func < 1e-8,
         "poly dev " + fmt(worst_poly) + " < 1e-10, func dev " + fmt(worst_func) + " < 1e-8");
}

// ---------------------------------------------------------------------------
// 2. Exponential growth of the polynomial-chaos condition number.
void criterion_instability() {
  ExperimentConfig cfg;
  cfg.command = "condnum";
  cfg.family = BasisFamily::HermitePoly;
  cfg.dist = Distribution::Gaussian;
  cfg.plan_rule = PlanRule::Quadratic;
  cfg.plan_c = 3.0;
  cfg.q_min = 2;
  cfg.q_max = 15;
  cfg.reps = 100;
  cfg.seed = 42;
  CsvTable table = run_condition_experiment(cfg);
  bool monotone = true;
  double prev = 0.0, c5 = 0.0, c15 = 0.0;
  for (const auto& row : table.rows) {
    const double mean = std::stod(row[3]);
    if (mean <= prev) monotone = false;
    prev = mean;
    if (row[0] == "5") c5 = mean;
    if (row[0] == "15") c15 = mean;
  }
  const double ratio = c15 / c5;
  record(2, "polynomial chaos conditioning grows exponentially (m=3N^2)",
         monotone && ratio > 1e3,
         std::string(monotone ? "monotone" : "NOT monotone") + ", cond(15)/cond(5) = " +
             fmt(ratio) + " > 1e3");
}

// ---------------------------------------------------------------------------
// 3. Function basis with mapped points stays well conditioned at m = 6N.
void criterion_stabilization() {
  ExperimentConfig cfg;
  cfg.command = "condnum";
  cfg.family = BasisFamily::HermiteFunc;
  cfg.dist = Distribution::MappedUniform;
  cfg.map_r = 0;
  cfg.L = 8.0;
  cfg.plan_rule = PlanRule::Linear;
  cfg.plan_c = 6.0;
  cfg.q_min = 25;
  cfg.q_max = 25;
  cfg.reps = 100;
  cfg.seed = 42;
  CsvTable stable = run_condition_experiment(cfg);
  cfg.family = BasisFamily::HermitePoly;
  cfg.dist = Distribution::Gaussian;
  CsvTable unstable = run_condition_experiment(cfg);
  const double func_cond = std::stod(stable.rows[0][3]);
  const double poly_cond = std::stod(unstable.rows[0][3]);
  record(3, "function basis with mapped points is stable at q=25 (m=6N)",
         func_cond < 1e3 && poly_cond / func_cond >= 1e6,
         "mean cond " + fmt(func_cond) + " < 1e3, polynomial/function ratio " +
             fmt(poly_cond / func_cond) + " >= 1e6");
}

// ---------------------------------------------------------------------------
// 4. Concentration of the rescaled Gram matrix at the prescribed m_min.
void criterion_stability_theorem() {
  bool expectation_ok = true;
  bool empirical_ok = true;
  std::ostringstream detail;
  for (int k : {3, 5, 8}) {
    StabilityCheckReport report = run_stability_check(k, 1.0, 1000, 20240607);
    SpectralDiagnostics eg = sym_eigs(expected_gram(k, report.L_used));
    const bool lambda_ok =
        eg.eigenvalues.back() <= 1.0 + 1e-8 && eg.eigenvalues.front() >= 0.75 - 1e-8;
    const bool freq_ok = report.violation_fraction <= report.probability_bound;
    expectation_ok = expectation_ok && lambda_ok;
    empirical_ok = empirical_ok && freq_ok;
    detail << "K=" << k << ": lam[" << fmt(eg.eigenvalues.front()) << ","
           << fmt(eg.eigenvalues.back()) << "] freq " << fmt(report.violation_fraction)
           << (freq_ok ? " <= " : " > ") << fmt(report.probability_bound) << " at m="
           << report.m_min << "; ";
  }
  if (!empirical_ok)
    detail << "expected-Gram bounds hold but the deviation frequency exceeds 2/m at the "
              "prescribed sample count (it drops below the bound near 2x that count)";
  record(4, "rescaled Gram concentration at the prescribed sample count",
         expectation_ok && empirical_ok, detail.str());
}

// ---------------------------------------------------------------------------
// 5. Quantile scaling accelerates convergence by >= 100x at q=30.
double scaled_fit_error(double p, double m_radius, ScalingKind kind, double mu, int q, double L,
                        std::uint64_t seed, Solver solver, double* cond_out) {
  IndexSet set = build_index_set(SpaceKind::TotalDegree, q, 1);
  SamplingPlan plan{PlanRule::Quadratic, 6.0};
  TargetFunction target = make_target("gauss_decay", {{"p", p}}, 1);
  SampleSet raw = sample(DistributionSpec::mapped({0, L}), plan.sample_count(set.size()), 1, seed);
  std::vector<double> alpha = select_scaling(raw, ScalingRule{kind, m_radius, mu});
  SampleSet points = compress_samples(raw, alpha);
  std::vector<double> values(points.m);
  for (std::size_t i = 0; i < points.m; ++i) values[i] = target.fn(points.row(i));
  Fit f = fit(BasisSpec(BasisFamily::HermiteFunc, set, alpha), points, values, solver);
  if (cond_out) *cond_out = f.diagnostics.cond;
  return linf_error(f, target.fn, 4000, derive_trial_seed(seed, 0x5EED));
}

void criterion_scaling_acceleration() {
  // The mapping parameter L=4 keeps the design stable here (cond ~ 10) and is
  // where the quantile rule's dilation lands inside its useful range; the
  // selection rule scales linearly with L.
  const double L = 4.0;
  const double u6 = scaled_fit_error(6.0, 3.0, ScalingKind::None, 1.0, 30, L, 42, Solver::QR,
                                     nullptr);
  const double s6 = scaled_fit_error(6.0, 3.0, ScalingKind::Quantile, 0.98, 30, L, 42,
                                     Solver::QR, nullptr);
  const double u02 = scaled_fit_error(0.2, 16.0, ScalingKind::None, 1.0, 30, L, 42, Solver::QR,
                                      nullptr);
  const double s02 = scaled_fit_error(0.2, 16.0, ScalingKind::Quantile, 0.98, 30, L, 42,
                                      Solver::QR, nullptr);
  record(5, "quantile scaling beats the unscaled fit by >= 100x at q=30",
         s6 <= 1e-2 * u6 && s02 <= 1e-2 * u02,
         "fast decay " + fmt(s6) + " vs " + fmt(u6) + "; slow decay " + fmt(s02) + " vs " +
             fmt(u02));
}

// ---------------------------------------------------------------------------
// 6. Random-ODE second moment against the closed form.
void criterion_ode_qoi() {
  const double reference = ode_qoi_reference(1.0, 1.5);
  QuadratureRule gl = golub_welsch(64, QuadratureWeight::GaussLaguerre);
  double quad = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    quad += gl.weights[i] * std::exp(-3.0 * gl.nodes[i]);
  const bool reference_ok =
      reference == 0.25 && std::abs(quad - reference) < 1e-12;

  OdeModel model{1.5, 1.0};
  SamplingPlan plan{PlanRule::Quadratic, 5.0};
  ScalingRule rule = ScalingRule::quantile(25.0, 0.995);
  QoIResult analytic = ode_qoi_lsq(model, 20, plan, 64.0, rule, 4242, false);
  QoIResult black_box = ode_qoi_lsq(model, 20, plan, 64.0, rule, 4242, true);
  record(6, "random-ODE second moment reaches 1e-4 by q=20",
         reference_ok && analytic.abs_error < 1e-4 && black_box.abs_error < 1e-4,
         "reference 0.25 (quad dev " + fmt(std::abs(quad - reference)) + "), abs err " +
             fmt(analytic.abs_error) + ", black-box " + fmt(black_box.abs_error));
}

// ---------------------------------------------------------------------------
// 7. Elliptic single-parameter QoI against the closed form.
void criterion_elliptic_single() {
  EllipticModel model;
  model.coefficient = EllipticModel::Coefficient::SingleParam;
  model.c = 0.5;
  model.x0 = 0.5;
  SamplingPlan plan{PlanRule::Quadratic, 5.0};

  model.n_elems = 512;
  QoIResult fine = elliptic_qoi_lsq(model, 12, plan, 8.0, 31415);
  model.n_elems = 256;
  QoIResult coarse = elliptic_qoi_lsq(model, 12, plan, 8.0, 31415);
  const double closed = elliptic_qoi_single_reference(0.5, 0.5);
  const double mesh_bound = 4.0 / 3.0 * std::abs(fine.approx - coarse.approx);
  const double tolerance = std::max(1e-4, mesh_bound);
  record(7, "elliptic single-parameter QoI matches the closed form",
         std::abs(fine.approx - closed) <= tolerance,
         "deviation " + fmt(std::abs(fine.approx - closed)) + " <= max(1e-4, mesh bound " +
             fmt(mesh_bound) + ")");
}

// ---------------------------------------------------------------------------
// 8. Elliptic three-parameter convergence against the tensor reference.
void criterion_elliptic_threeparam() {
  SamplingPlan plan{PlanRule::Linear, 10.0};
  bool pass = true;
  std::ostringstream detail;
  for (double x0 : {0.25, 0.85}) {
    EllipticModel model;
    model.coefficient = EllipticModel::Coefficient::ThreeParam;
    model.x0 = x0;
    model.n_elems = 256;
    try {
      const double reference = reference_qoi_tensor_quad(model, 20);
      QoIResult q2 = elliptic_qoi_lsq(model, 2, plan, 8.0, derive_trial_seed(271828, 2), reference);
      QoIResult q6 = elliptic_qoi_lsq(model, 6, plan, 8.0, derive_trial_seed(271828, 6), reference);
      const bool ok = q6.abs_error * 10.0 <= q2.abs_error;
      pass = pass && ok;
      detail << "x0=" << x0 << ": err(q=2)=" << fmt(q2.abs_error)
             << " err(q=6)=" << fmt(q6.abs_error) << (ok ? " ok; " : " NOT 10x; ");
    } catch (const ConvergenceError& e) {
      pass = false;
      detail << "x0=" << x0 << ": no self-converged reference exists (the affine coefficient "
             << "crosses zero on a positive-probability set, so the weighted second moment "
             << "diverges); quadrature levels disagree: " << e.what() << "; ";
    }
  }
  record(8, "elliptic three-parameter error drops 10x from q=2 to q=6", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 9. Determinism across reruns and thread counts.
void criterion_determinism() {
  ExperimentConfig conv;
  conv.command = "converge";
  conv.q_min = 0;
  conv.q_max = 8;
  conv.plan_rule = PlanRule::Quadratic;
  conv.plan_c = 4.0;
  conv.scaling = ScalingKind::Quantile;
  conv.support_radius = 3.0;
  conv.n_eval = 1000;
  conv.seed = 2718;
  conv.deterministic = true;
  TargetFunction target = make_target("gauss_decay", {{"p", 6.0}}, 1);
  conv.threads = 1;
  const std::string a = run_convergence_experiment(conv, target).render();
  conv.threads = 3;
  const std::string b = run_convergence_experiment(conv, target).render();
  conv.threads = 8;
  const std::string c = run_convergence_experiment(conv, target).render();

  ExperimentConfig cond;
  cond.command = "condnum";
  cond.q_min = 0;
  cond.q_max = 6;
  cond.reps = 20;
  cond.seed = 1618;
  cond.threads = 1;
  const std::string d = run_condition_experiment(cond).render();
  cond.threads = 7;
  const std::string e = run_condition_experiment(cond).render();

  record(9, "reruns are byte-identical at any thread count", a == b && b == c && d == e,
         "converge CSV x3 thread counts, condnum CSV x2 thread counts");
}

// ---------------------------------------------------------------------------
// 10. QR and Cholesky coefficient paths agree on well-conditioned fits.
void criterion_solver_agreement() {
  double worst = 0.0;
  int compared = 0;

  auto compare = [&](const Fit& qr, const Fit& chol) {
    if (qr.diagnostics.cond >= 1e6) return;
    ++compared;
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < qr.coefficients.size(); ++i) {
      diff += std::pow(qr.coefficients[i] - chol.coefficients[i], 2);
      norm += qr.coefficients[i] * qr.coefficients[i];
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300));
  };

  // fits drawn from the configurations of criteria 5-8
  auto scaled_fit = [&](double p, double m_radius, ScalingKind kind, double mu, int q, double L,
                        std::uint64_t seed, Solver solver) {
    IndexSet set = build_index_set(SpaceKind::TotalDegree, q, 1);
    SamplingPlan plan{PlanRule::Quadratic, 6.0};
    TargetFunction target = make_target("gauss_decay", {{"p", p}}, 1);
    SampleSet raw =
        sample(DistributionSpec::mapped({0, L}), plan.sample_count(set.size()), 1, seed);
    std::vector<double> alpha = select_scaling(raw, ScalingRule{kind, m_radius, mu});
    SampleSet points = compress_samples(raw, alpha);
    std::vector<double> values(points.m);
    for (std::size_t i = 0; i < points.m; ++i) values[i] = target.fn(points.row(i));
    return fit(BasisSpec(BasisFamily::HermiteFunc, set, alpha), points, values, solver);
  };
  for (double p : {6.0, 0.2}) {
    const double radius = p == 6.0 ? 3.0 : 16.0;
    compare(scaled_fit(p, radius, ScalingKind::Quantile, 0.98, 30, 4.0, 42, Solver::QR),
            scaled_fit(p, radius, ScalingKind::Quantile, 0.98, 30, 4.0, 42, Solver::Cholesky));
    compare(scaled_fit(p, radius, ScalingKind::None, 1.0, 30, 4.0, 42, Solver::QR),
            scaled_fit(p, radius, ScalingKind::None, 1.0, 30, 4.0, 42, Solver::Cholesky));
  }

  // ODE pipeline fit (criterion 6 configuration)
  {
    IndexSet set = build_index_set(SpaceKind::TotalDegree, 20, 1);
    SamplingPlan plan{PlanRule::Quadratic, 5.0};
    SampleSet raw =
        sample(DistributionSpec::mapped({1, 64.0}), plan.sample_count(set.size()), 1, 4242);
    std::vector<double> alpha = select_scaling(raw, ScalingRule::quantile(25.0, 0.995));
    SampleSet points = compress_samples(raw, alpha);
    std::vector<double> values(points.m);
    for (std::size_t i = 0; i < points.m; ++i) {
      const double y = points.at(i, 0);
      const double f = ode_solution(1.0, y, 1.5);
      values[i] = std::exp(-y) * f * f;
    }
    BasisSpec spec(BasisFamily::LaguerreFunc, set, alpha);
    compare(fit(spec, points, values, Solver::QR), fit(spec, points, values, Solver::Cholesky));
  }

  // elliptic single-parameter pipeline fit (criterion 7 configuration)
  {
    IndexSet set = build_index_set(SpaceKind::TotalDegree, 12, 1);
    SamplingPlan plan{PlanRule::Quadratic, 5.0};
    SampleSet points =
        sample(DistributionSpec::mapped({0, 8.0}), plan.sample_count(set.size()), 1, 31415);
    std::vector<double> values(points.m);
    for (std::size_t i = 0; i < points.m; ++i) {
      const double y = points.at(i, 0);
      const double a_val = std::exp(0.5 * y);
      const double u = elliptic_solve_fem([&](double) { return a_val; }, 256).at(0.5);
      values[i] = std::exp(-0.5 * y * y) * u * u;
    }
    BasisSpec spec = BasisSpec::unscaled(BasisFamily::HermiteFunc, set);
    compare(fit(spec, points, values, Solver::QR), fit(spec, points, values, Solver::Cholesky));
  }

  record(10, "QR and Cholesky coefficients agree to 1e-7 when cond < 1e6",
         compared >= 6 && worst <= 1e-7,
         std::to_string(compared) + " fits compared, worst relative gap " + fmt(worst));
}

}  // namespace

int main() {
  criterion_orthonormality();
  criterion_instability();
  criterion_stabilization();
  criterion_stability_theorem();
  criterion_scaling_acceleration();
  criterion_ode_qoi();
  criterion_elliptic_single();
  criterion_elliptic_threeparam();
  criterion_determinism();
  criterion_solver_agreement();

  int failures = 0;
  for (const Criterion& c : g_results) failures += c.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(g_results.size()) - failures,
              g_results.size());
  return failures;
}
