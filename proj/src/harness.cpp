#include "ulsq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <optional>
#include <sstream>

#include "ulsq/parallel.hpp"

namespace ulsq {

namespace {

constexpr std::uint64_t kEvalSeedTag = 0x4556414c5345454dull;

// Monte Carlo estimator of the mapped-expectation Gram matrix: xi is uniform
// on (-1,1) with density 1/2, so the factor 2L/m makes E[scale * D^T D] equal
// the integral matrix that the concentration statement is about.
constexpr double kStabilityGramScale = 2.0;

std::string error_label(const std::exception& e) {
  if (dynamic_cast<const RankDeficientError*>(&e)) return "error:rank-deficient";
  if (dynamic_cast<const NotPositiveDefiniteError*>(&e)) return "error:not-spd";
  if (dynamic_cast<const DivergentQoiError*>(&e)) return "error:divergent-qoi";
  if (dynamic_cast<const SampleRejectionError*>(&e)) return "error:sample-rejection";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "error:no-convergence";
  if (dynamic_cast<const DomainError*>(&e)) return "error:domain";
  return "error:runtime";
}

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvTable::render() const {
  std::ostringstream out;
  for (const auto& [key, value] : metadata) out << "# " << key << "=" << value << "\n";
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out << ",";
    out << columns[j];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ",";
      out << row[j];
    }
    out << "\n";
  }
  return out.str();
}

TargetFunction make_target(const std::string& id, const std::map<std::string, double>& params,
                           int dim) {
  auto param = [&params](const std::string& name, double fallback) {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
  };

  TargetFunction target;
  target.id = id;
  target.dim = dim;
  if (id == "gauss_decay") {
    const double p = param("p", 1.0);
    target.params = {{"p", p}};
    target.fn = [p](std::span<const double> y) {
      double s = 0.0;
      for (double v : y) s += v * v;
      return std::exp2(-p * s);
    };
    return target;
  }
  if (id == "gauss_sin_2d") {
    if (dim != 2) throw ContractError("gauss_sin_2d is a two-dimensional target");
    target.fn = [](std::span<const double> y) {
      return std::exp(-4.0 * (y[0] * y[0] + y[1] * y[1])) * std::sin(y[0] + y[1]);
    };
    return target;
  }
  if (id == "ode_tilde") {
    if (dim != 1) throw ContractError("ode_tilde is a one-dimensional target");
    const double beta = param("beta", 1.5);
    const double t = param("t", 1.0);
    target.params = {{"beta", beta}, {"t", t}};
    target.fn = [beta, t](std::span<const double> y) {
      return std::exp(-y[0]) * std::exp(-2.0 * beta * t * y[0]);
    };
    return target;
  }
  throw ContractError("unknown target function: " + id);
}

DistributionSpec distribution_from_config(const ExperimentConfig& cfg) {
  if (cfg.dist == Distribution::MappedUniform)
    return DistributionSpec::mapped({cfg.map_r, cfg.L});
  return DistributionSpec{cfg.dist, {}};
}

namespace {

void append_common_metadata(CsvTable& table, const ExperimentConfig& cfg) {
  table.metadata.emplace_back("version", kVersion);
  table.metadata.emplace_back("command", cfg.command);
  table.metadata.emplace_back("rng", std::string(rng_algorithm_id()));
  table.metadata.emplace_back("seed", std::to_string(cfg.seed));
  if (cfg.timestamp && !cfg.deterministic) table.metadata.emplace_back("timestamp", iso_timestamp());
}

const char* plan_name(PlanRule rule) { return rule == PlanRule::Linear ? "linear" : "quadratic"; }
const char* space_name(SpaceKind kind) {
  return kind == SpaceKind::TensorProduct ? "tp" : "td";
}
const char* scaling_name(ScalingKind kind) {
  switch (kind) {
    case ScalingKind::None: return "none";
    case ScalingKind::Maximum: return "maximum";
    case ScalingKind::Quantile: return "quantile";
  }
  return "unknown";
}

}  // namespace

std::vector<std::string> csv_columns(const std::string& command, int dim) {
  std::vector<std::string> cols;
  if (command == "condnum") {
    cols = {"q", "N", "m", "mean_cond", "geo_mean_cond", "std_log10_cond",
            "reps", "failures", "overflows"};
  } else if (command == "converge") {
    cols = {"q", "N", "m", "cond", "linf_error"};
    for (int i = 1; i <= dim; ++i) cols.push_back("alpha_" + std::to_string(i));
    cols.push_back("status");
  } else if (command == "stability") {
    cols = {"K", "r", "trials", "kappa", "c_half", "tau", "m_min", "L_used",
            "violations", "violation_fraction", "prob_bound"};
  } else if (command == "uq-ode" || command == "uq-elliptic") {
    cols = {"q", "N", "m", "approx_qoi", "reference_qoi", "abs_error", "cond"};
    for (int i = 1; i <= dim; ++i) cols.push_back("alpha_" + std::to_string(i));
    cols.push_back("status");
  } else {
    throw ContractError("csv_columns: unknown command " + command);
  }
  return cols;
}

CsvTable run_condition_experiment(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw ContractError("condnum: reps must be >= 1");
  if (cfg.q_max < cfg.q_min) throw ContractError("condnum: empty q range");
  const DistributionSpec dist = distribution_from_config(cfg);
  const SamplingPlan plan{cfg.plan_rule, cfg.plan_c};

  CsvTable table;
  append_common_metadata(table, cfg);
  table.metadata.emplace_back("basis", family_name(cfg.family));
  table.metadata.emplace_back("space", space_name(cfg.space));
  table.metadata.emplace_back("dim", std::to_string(cfg.dim));
  table.metadata.emplace_back("qmin", std::to_string(cfg.q_min));
  table.metadata.emplace_back("qmax", std::to_string(cfg.q_max));
  table.metadata.emplace_back("rule", plan_name(cfg.plan_rule));
  table.metadata.emplace_back("c", format_double(cfg.plan_c));
  table.metadata.emplace_back("dist", distribution_name(cfg.dist));
  if (cfg.dist == Distribution::MappedUniform) {
    table.metadata.emplace_back("map-r", std::to_string(cfg.map_r));
    table.metadata.emplace_back("L", format_double(cfg.L));
  }
  table.metadata.emplace_back("reps", std::to_string(cfg.reps));
  table.columns = csv_columns("condnum", cfg.dim);

  const auto reps = static_cast<std::size_t>(cfg.reps);
  for (int q = cfg.q_min; q <= cfg.q_max; ++q) {
    IndexSet set = build_index_set(cfg.space, q, cfg.dim);
    const BasisSpec spec = BasisSpec::unscaled(cfg.family, set);
    const std::size_t n = set.size();
    const std::size_t m = plan.sample_count(n);
    const std::uint64_t q_seed = derive_trial_seed(cfg.seed, static_cast<std::uint64_t>(q));

    std::vector<double> conds(reps, 0.0);
    std::vector<char> failed(reps, 0);
    parallel_for(reps, cfg.threads, [&](std::size_t trial) {
      try {
        SampleSet samples =
            sample(dist, m, static_cast<std::size_t>(cfg.dim), derive_trial_seed(q_seed, trial));
        conds[trial] = sym_eigs(gram(assemble_design(spec, samples))).cond;
      } catch (const std::exception&) {
        failed[trial] = 1;
      }
    });

    std::size_t failures = 0;
    std::size_t overflows = 0;
    double sum = 0.0;
    double sum_log10 = 0.0;
    double sum_log10_sq = 0.0;
    std::size_t finite_count = 0;
    std::size_t used = 0;
    for (std::size_t t = 0; t < reps; ++t) {
      if (failed[t]) {
        ++failures;
        continue;
      }
      ++used;
      const double c = conds[t];
      sum += c;
      if (c >= kCondSentinel) {
        ++overflows;
      } else {
        const double lg = std::log10(c);
        sum_log10 += lg;
        sum_log10_sq += lg * lg;
        ++finite_count;
      }
    }

    double mean = used ? std::min(sum / static_cast<double>(used), kCondSentinel)
                       : std::numeric_limits<double>::quiet_NaN();
    double geo = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    if (finite_count) {
      const double mean_log = sum_log10 / static_cast<double>(finite_count);
      geo = std::pow(10.0, mean_log);
      sd = std::sqrt(std::max(0.0, sum_log10_sq / static_cast<double>(finite_count) -
                                       mean_log * mean_log));
    }

    table.rows.push_back({std::to_string(q), std::to_string(n), std::to_string(m),
                          format_double(mean), format_double(geo), format_double(sd),
                          std::to_string(cfg.reps), std::to_string(failures),
                          std::to_string(overflows)});
  }
  return table;
}

CsvTable run_convergence_experiment(const ExperimentConfig& cfg, const TargetFunction& target) {
  if (cfg.q_max < cfg.q_min) throw ContractError("converge: empty q range");
  if (target.dim != cfg.dim) throw ContractError("converge: target dimension mismatch");
  const DistributionSpec dist = distribution_from_config(cfg);
  const SamplingPlan plan{cfg.plan_rule, cfg.plan_c};
  const ScalingRule rule{cfg.scaling, cfg.support_radius, cfg.mu};

  CsvTable table;
  append_common_metadata(table, cfg);
  table.metadata.emplace_back("target", target.id);
  for (const auto& [key, value] : target.params)
    table.metadata.emplace_back(key, format_double(value));
  table.metadata.emplace_back("basis", family_name(cfg.family));
  table.metadata.emplace_back("space", space_name(cfg.space));
  table.metadata.emplace_back("dim", std::to_string(cfg.dim));
  table.metadata.emplace_back("qmin", std::to_string(cfg.q_min));
  table.metadata.emplace_back("qmax", std::to_string(cfg.q_max));
  table.metadata.emplace_back("rule", plan_name(cfg.plan_rule));
  table.metadata.emplace_back("c", format_double(cfg.plan_c));
  table.metadata.emplace_back("dist", distribution_name(cfg.dist));
  if (cfg.dist == Distribution::MappedUniform) {
    table.metadata.emplace_back("map-r", std::to_string(cfg.map_r));
    table.metadata.emplace_back("L", format_double(cfg.L));
  }
  table.metadata.emplace_back("scaling", scaling_name(cfg.scaling));
  if (cfg.scaling != ScalingKind::None) {
    table.metadata.emplace_back("M", format_double(cfg.support_radius));
    if (cfg.scaling == ScalingKind::Quantile)
      table.metadata.emplace_back("mu", format_double(cfg.mu));
  }
  table.metadata.emplace_back("neval", std::to_string(cfg.n_eval));
  table.metadata.emplace_back("solver", cfg.solver == Solver::QR ? "qr" : "cholesky");
  table.columns = csv_columns("converge", cfg.dim);

  const auto n_rows = static_cast<std::size_t>(cfg.q_max - cfg.q_min + 1);
  std::vector<std::vector<std::string>> rows(n_rows);
  parallel_for(n_rows, cfg.threads, [&](std::size_t i) {
    const int q = cfg.q_min + static_cast<int>(i);
    IndexSet set = build_index_set(cfg.space, q, cfg.dim);
    const std::size_t n = set.size();
    const std::size_t m = plan.sample_count(n);
    const std::uint64_t q_seed = derive_trial_seed(cfg.seed, static_cast<std::uint64_t>(q));
    const std::uint64_t eval_seed =
        derive_trial_seed(derive_trial_seed(cfg.seed, kEvalSeedTag), static_cast<std::uint64_t>(q));

    std::vector<std::string> row{std::to_string(q), std::to_string(n), std::to_string(m)};
    try {
      SampleSet raw = sample(dist, m, static_cast<std::size_t>(cfg.dim), q_seed);
      std::vector<double> alpha = select_scaling(raw, rule);
      SampleSet points = compress_samples(raw, alpha);
      std::vector<double> values(m);
      for (std::size_t k = 0; k < m; ++k) values[k] = target.fn(points.row(k));
      Fit f = fit(BasisSpec(cfg.family, std::move(set), alpha), points, values, cfg.solver);
      const double err = linf_error(f, target.fn, cfg.n_eval, eval_seed);
      row.push_back(format_double(f.diagnostics.cond));
      row.push_back(format_double(err));
      for (double a : alpha) row.push_back(format_double(a));
      row.emplace_back("ok");
    } catch (const std::exception& e) {
      row.resize(3);
      row.push_back("nan");
      row.push_back("nan");
      for (int j = 0; j < cfg.dim; ++j) row.push_back("nan");
      row.push_back(error_label(e));
    }
    rows[i] = std::move(row);
  });
  table.rows = std::move(rows);
  return table;
}

StabilityCheckReport run_stability_check(int K, double r, int trials, std::uint64_t seed,
                                         int threads) {
  if (K < 1) throw ContractError("run_stability_check: K must be >= 1");
  if (!(r > 0.0)) throw ContractError("run_stability_check: r must be positive");
  if (trials < 100) throw ContractError("run_stability_check: need at least 100 trials");

  StabilityCheckReport report;
  report.K = K;
  report.r = r;
  report.trials = trials;
  report.seed = seed;
  report.c_half = 0.5 * (1.0 + std::log(0.5));
  report.kappa = 4.0 * report.c_half / (3.0 * (1.0 + r));
  report.tau = estimate_tau(K).tau;

  // Smallest m with m/log(m) >= K/kappa; the ratio is increasing for m >= 3.
  const double threshold = static_cast<double>(K) / report.kappa;
  auto ratio = [](std::size_t m) { return static_cast<double>(m) / std::log(static_cast<double>(m)); };
  std::size_t hi = 3;
  while (ratio(hi) < threshold) hi *= 2;
  std::size_t lo = hi > 3 ? hi / 2 : 3;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (ratio(mid) >= threshold) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  report.m_min = hi;
  report.L_used = 1.01 * std::max(3.0 * report.tau, 5.0 * std::sqrt(static_cast<double>(K)));

  IndexSet set = build_index_set(SpaceKind::TotalDegree, K - 1, 1);
  const BasisSpec spec = BasisSpec::unscaled(BasisFamily::HermiteFunc, std::move(set));
  const DistributionSpec dist = DistributionSpec::mapped({0, report.L_used});
  const double scale =
      kStabilityGramScale * report.L_used / static_cast<double>(report.m_min);

  const auto n_trials = static_cast<std::size_t>(trials);
  std::vector<char> violated(n_trials, 0);
  parallel_for(n_trials, threads, [&](std::size_t trial) {
    SampleSet samples = sample(dist, report.m_min, 1, derive_trial_seed(seed, trial));
    DenseMatrix a = gram(assemble_design(spec, samples));
    for (double& v : a.data()) v *= scale;
    if (sym_eigs(a).dist_to_identity >= 0.625) violated[trial] = 1;
  });

  report.violation_count = static_cast<int>(std::count(violated.begin(), violated.end(), 1));
  report.violation_fraction =
      static_cast<double>(report.violation_count) / static_cast<double>(trials);
  report.probability_bound = 2.0 * std::pow(static_cast<double>(report.m_min), -r);
  return report;
}

CsvTable stability_report_csv(const StabilityCheckReport& report) {
  CsvTable table;
  table.metadata.emplace_back("version", kVersion);
  table.metadata.emplace_back("command", "stability");
  table.metadata.emplace_back("rng", std::string(rng_algorithm_id()));
  table.metadata.emplace_back("seed", std::to_string(report.seed));
  table.columns = csv_columns("stability", 1);
  table.rows.push_back({std::to_string(report.K), format_double(report.r),
                        std::to_string(report.trials), format_double(report.kappa),
                        format_double(report.c_half), format_double(report.tau),
                        std::to_string(report.m_min), format_double(report.L_used),
                        std::to_string(report.violation_count),
                        format_double(report.violation_fraction),
                        format_double(report.probability_bound)});
  return table;
}

CsvTable run_uq_ode_experiment(const ExperimentConfig& cfg) {
  if (cfg.q_max < cfg.q_min) throw ContractError("uq-ode: empty q range");
  const SamplingPlan plan{cfg.plan_rule, cfg.plan_c};
  const ScalingRule rule{cfg.scaling, cfg.support_radius, cfg.mu};
  const OdeModel model{cfg.beta, cfg.t};

  CsvTable table;
  append_common_metadata(table, cfg);
  table.metadata.emplace_back("beta", format_double(cfg.beta));
  table.metadata.emplace_back("t", format_double(cfg.t));
  table.metadata.emplace_back("qmin", std::to_string(cfg.q_min));
  table.metadata.emplace_back("qmax", std::to_string(cfg.q_max));
  table.metadata.emplace_back("rule", plan_name(cfg.plan_rule));
  table.metadata.emplace_back("c", format_double(cfg.plan_c));
  table.metadata.emplace_back("L", format_double(cfg.L));
  table.metadata.emplace_back("scaling", scaling_name(cfg.scaling));
  if (cfg.scaling != ScalingKind::None) {
    table.metadata.emplace_back("M", format_double(cfg.support_radius));
    if (cfg.scaling == ScalingKind::Quantile)
      table.metadata.emplace_back("mu", format_double(cfg.mu));
  }
  table.metadata.emplace_back("black-box", cfg.black_box ? "true" : "false");
  table.columns = csv_columns("uq-ode", 1);

  const auto n_rows = static_cast<std::size_t>(cfg.q_max - cfg.q_min + 1);
  std::vector<std::vector<std::string>> rows(n_rows);
  parallel_for(n_rows, cfg.threads, [&](std::size_t i) {
    const int q = cfg.q_min + static_cast<int>(i);
    std::vector<std::string> row{std::to_string(q), std::to_string(q + 1)};
    try {
      QoIResult result = ode_qoi_lsq(model, q, plan, cfg.L, rule,
                                     derive_trial_seed(cfg.seed, static_cast<std::uint64_t>(q)),
                                     cfg.black_box);
      row.push_back(std::to_string(result.meta.m));
      row.push_back(format_double(result.approx));
      row.push_back(format_double(result.reference));
      row.push_back(format_double(result.abs_error));
      row.push_back(format_double(result.meta.cond));
      row.push_back(format_double(result.meta.alpha[0]));
      row.emplace_back("ok");
    } catch (const std::exception& e) {
      row.resize(2);
      for (int j = 0; j < 6; ++j) row.push_back("nan");
      row.push_back(error_label(e));
    }
    rows[i] = std::move(row);
  });
  table.rows = std::move(rows);
  return table;
}

CsvTable run_uq_elliptic_experiment(const ExperimentConfig& cfg) {
  if (cfg.q_max < cfg.q_min) throw ContractError("uq-elliptic: empty q range");
  const SamplingPlan plan{cfg.plan_rule, cfg.plan_c};
  EllipticModel model;
  model.coefficient = cfg.elliptic_coef == "single" ? EllipticModel::Coefficient::SingleParam
                                                    : EllipticModel::Coefficient::ThreeParam;
  model.c = cfg.coef_c;
  model.x0 = cfg.x0;
  model.n_elems = cfg.n_elems;
  const int dim = model.coefficient == EllipticModel::Coefficient::SingleParam ? 1 : 3;

  CsvTable table;
  append_common_metadata(table, cfg);
  table.metadata.emplace_back("coef", cfg.elliptic_coef);
  if (model.coefficient == EllipticModel::Coefficient::SingleParam)
    table.metadata.emplace_back("coef-c", format_double(cfg.coef_c));
  table.metadata.emplace_back("x0", format_double(cfg.x0));
  table.metadata.emplace_back("n-elems", std::to_string(cfg.n_elems));
  table.metadata.emplace_back("ref-nodes", std::to_string(cfg.ref_nodes));
  table.metadata.emplace_back("qmin", std::to_string(cfg.q_min));
  table.metadata.emplace_back("qmax", std::to_string(cfg.q_max));
  table.metadata.emplace_back("rule", plan_name(cfg.plan_rule));
  table.metadata.emplace_back("c", format_double(cfg.plan_c));
  table.metadata.emplace_back("L", format_double(cfg.L));
  table.columns = csv_columns("uq-elliptic", dim);

  // Reference is independent of q; compute it once. A reference that fails
  // its self-convergence gate labels every row instead of aborting the sweep.
  std::optional<double> reference;
  std::string reference_failure;
  try {
    reference = model.coefficient == EllipticModel::Coefficient::SingleParam
                    ? elliptic_qoi_single_reference(model.c, model.x0)
                    : reference_qoi_tensor_quad(model, cfg.ref_nodes);
  } catch (const std::exception& e) {
    reference_failure = error_label(e);
  }

  const auto n_rows = static_cast<std::size_t>(cfg.q_max - cfg.q_min + 1);
  std::vector<std::vector<std::string>> rows(n_rows);
  std::vector<double> rejection_rates(n_rows, 0.0);
  parallel_for(n_rows, cfg.threads, [&](std::size_t i) {
    const int q = cfg.q_min + static_cast<int>(i);
    const std::size_t n = index_set_cardinality(SpaceKind::TotalDegree, q, dim);
    std::vector<std::string> row{std::to_string(q), std::to_string(n)};
    if (!reference) {
      for (int j = 0; j < 5 + dim; ++j) row.push_back("nan");
      row.push_back(reference_failure);
      rows[i] = std::move(row);
      return;
    }
    try {
      QoIResult result = elliptic_qoi_lsq(model, q, plan, cfg.L,
                                          derive_trial_seed(cfg.seed, static_cast<std::uint64_t>(q)),
                                          *reference);
      row.push_back(std::to_string(result.meta.m));
      row.push_back(format_double(result.approx));
      row.push_back(format_double(result.reference));
      row.push_back(format_double(result.abs_error));
      row.push_back(format_double(result.meta.cond));
      for (double a : result.meta.alpha) row.push_back(format_double(a));
      row.emplace_back("ok");
      rejection_rates[i] = result.meta.rejection_rate;
    } catch (const std::exception& e) {
      row.resize(2);
      for (int j = 0; j < 5 + dim; ++j) row.push_back("nan");
      row.push_back(error_label(e));
    }
    rows[i] = std::move(row);
  });
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (rejection_rates[i] > 0.0)
      std::fprintf(stderr, "uq-elliptic: q=%d rejected %.1f%% of draws\n",
                   cfg.q_min + static_cast<int>(i), 100.0 * rejection_rates[i]);
  }
  table.rows = std::move(rows);
  return table;
}

}  // namespace ulsq
