#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ulsq/uq_models.hpp"

namespace ulsq {

inline constexpr const char* kVersion = "0.1.0";

/// Named target function with parameters, used by convergence sweeps.
struct TargetFunction {
  std::string id;
  int dim = 1;
  std::map<std::string, double> params;
  TargetFn fn;
};

/// Registry lookup. Known identifiers:
///   gauss_decay (param p, any dimension):  y -> 2^{-p |y|^2}
///   gauss_sin_2d (dimension 2):            y -> e^{-4(y1^2+y2^2)} sin(y1+y2)
///   ode_tilde (params beta, t, 1d):        y -> e^{-y} e^{-2 beta t y}
TargetFunction make_target(const std::string& id, const std::map<std::string, double>& params,
                           int dim);

struct ExperimentConfig {
  std::string command;

  BasisFamily family = BasisFamily::HermiteFunc;
  SpaceKind space = SpaceKind::TotalDegree;
  int dim = 1;
  int q_min = 0;
  int q_max = 20;

  PlanRule plan_rule = PlanRule::Linear;
  double plan_c = 6.0;

  Distribution dist = Distribution::MappedUniform;
  int map_r = 0;
  double L = 8.0;

  ScalingKind scaling = ScalingKind::None;
  double support_radius = 3.0;  // M
  double mu = 0.98;
  Solver solver = Solver::QR;

  int reps = 100;
  std::uint64_t seed = 42;
  int threads = 0;  // 0 = hardware concurrency; never affects results
  bool deterministic = false;
  bool timestamp = false;

  std::string target = "gauss_decay";
  double p = 6.0;
  double beta = 1.5;
  double t = 1.0;
  bool black_box = false;
  std::size_t n_eval = 4000;

  std::string elliptic_coef = "three";  // or "single"
  double coef_c = 0.5;
  double x0 = 0.5;
  int n_elems = 256;
  int ref_nodes = 20;

  int stability_K = 5;
  double stability_r = 1.0;
  int trials = 1000;

  std::string out;
};

/// Rendered CSV: '#' metadata lines, a column-name row, then data rows.
/// Floats are printed with 17 significant digits so they round-trip.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
};

std::string format_double(double v);

DistributionSpec distribution_from_config(const ExperimentConfig& cfg);

/// Mean condition number of the Gram matrix over repeated random designs,
/// per order q. Sentinel-valued trials saturate the arithmetic mean and are
/// excluded from the geometric mean.
CsvTable run_condition_experiment(const ExperimentConfig& cfg);

/// Fit-and-measure sweep over q: scaling selection, least-squares fit and
/// max-error on a random evaluation grid.
CsvTable run_convergence_experiment(const ExperimentConfig& cfg, const TargetFunction& target);

struct StabilityCheckReport {
  int K = 0;
  double r = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  double kappa = 0.0;
  double c_half = 0.0;
  double tau = 0.0;
  std::size_t m_min = 0;
  double L_used = 0.0;
  int violation_count = 0;       // trials with dist(A_hat, I) >= 5/8
  double violation_fraction = 0.0;
  double probability_bound = 0.0;  // 2 m^{-r}
};

/// Empirical check of the scaled-Gram concentration bound: with m_min points
/// from the smallest m with m/log m >= K/kappa, and L just above
/// max(3 tau, 5 sqrt(K)), the fraction of trials where the rescaled Gram
/// matrix leaves the 5/8 ball around the identity is compared against
/// 2 m^{-r}.
StabilityCheckReport run_stability_check(int K, double r, int trials, std::uint64_t seed,
                                         int threads = 0);

CsvTable stability_report_csv(const StabilityCheckReport& report);

CsvTable run_uq_ode_experiment(const ExperimentConfig& cfg);
CsvTable run_uq_elliptic_experiment(const ExperimentConfig& cfg);

/// Column schema per subcommand, used by selftest and tests.
std::vector<std::string> csv_columns(const std::string& command, int dim);

/// Entry point behind the command-line binary. Exit codes: 0 success,
/// 1 usage error, 2 runtime failure.
int cli_main(int argc, const char* const* argv);

}  // namespace ulsq
