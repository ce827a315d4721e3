#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "ulsq/harness.hpp"

namespace ulsq {

namespace {

const std::map<std::string, BasisFamily> kFamilyNames{
    {"hermite-poly", BasisFamily::HermitePoly},
    {"hermite-func", BasisFamily::HermiteFunc},
    {"laguerre-poly", BasisFamily::LaguerrePoly},
    {"laguerre-func", BasisFamily::LaguerreFunc},
};
const std::map<std::string, SpaceKind> kSpaceNames{
    {"tp", SpaceKind::TensorProduct},
    {"td", SpaceKind::TotalDegree},
};
const std::map<std::string, PlanRule> kRuleNames{
    {"linear", PlanRule::Linear},
    {"quadratic", PlanRule::Quadratic},
};
const std::map<std::string, Distribution> kDistNames{
    {"gaussian", Distribution::Gaussian},
    {"exponential", Distribution::Exponential},
    {"uniform-sym", Distribution::UniformSym},
    {"uniform-pos", Distribution::UniformPos},
    {"mapped", Distribution::MappedUniform},
};
const std::map<std::string, ScalingKind> kScalingNames{
    {"none", ScalingKind::None},
    {"maximum", ScalingKind::Maximum},
    {"quantile", ScalingKind::Quantile},
};
const std::map<std::string, Solver> kSolverNames{
    {"qr", Solver::QR},
    {"cholesky", Solver::Cholesky},
};

void add_output_options(CLI::App* sub, ExperimentConfig& cfg, std::string& config_path) {
  sub->add_option("--out", cfg.out, "Output CSV path (stdout when omitted)");
  sub->add_option("--seed", cfg.seed, "Base seed for all random streams");
  sub->add_option("--threads", cfg.threads,
                  "Worker threads, 0 = auto; affects speed only, never results");
  sub->add_flag("--deterministic", cfg.deterministic,
                "Suppress any time-dependent metadata in the CSV header");
  sub->add_flag("--timestamp", cfg.timestamp, "Include a timestamp metadata line");
  sub->add_option("--config", config_path,
                  "Flat key=value file supplying defaults; command-line flags override");
}

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

template <typename T>
bool parse_with(const std::map<std::string, T>& names, const std::string& value, T& out) {
  auto it = names.find(value);
  if (it == names.end()) return false;
  out = it->second;
  return true;
}

bool parse_bool(const std::string& value, bool& out) {
  if (value == "true" || value == "1") {
    out = true;
    return true;
  }
  if (value == "false" || value == "0") {
    out = false;
    return true;
  }
  return false;
}

// Applies one config-file entry; keys mirror the flag names without dashes.
// Returns false for keys this build does not know at all.
bool apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "basis") return parse_with(kFamilyNames, value, cfg.family);
    if (key == "space") return parse_with(kSpaceNames, value, cfg.space);
    if (key == "rule") return parse_with(kRuleNames, value, cfg.plan_rule);
    if (key == "dist") return parse_with(kDistNames, value, cfg.dist);
    if (key == "scaling") return parse_with(kScalingNames, value, cfg.scaling);
    if (key == "solver") return parse_with(kSolverNames, value, cfg.solver);
    if (key == "dim") cfg.dim = std::stoi(value);
    else if (key == "qmin") cfg.q_min = std::stoi(value);
    else if (key == "qmax") cfg.q_max = std::stoi(value);
    else if (key == "map-r") cfg.map_r = std::stoi(value);
    else if (key == "reps") cfg.reps = std::stoi(value);
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "n-elems") cfg.n_elems = std::stoi(value);
    else if (key == "ref-nodes") cfg.ref_nodes = std::stoi(value);
    else if (key == "K") cfg.stability_K = std::stoi(value);
    else if (key == "trials") cfg.trials = std::stoi(value);
    else if (key == "neval") cfg.n_eval = static_cast<std::size_t>(std::stoull(value));
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "c") cfg.plan_c = std::stod(value);
    else if (key == "L") cfg.L = std::stod(value);
    else if (key == "M") cfg.support_radius = std::stod(value);
    else if (key == "mu") cfg.mu = std::stod(value);
    else if (key == "p") cfg.p = std::stod(value);
    else if (key == "beta") cfg.beta = std::stod(value);
    else if (key == "t") cfg.t = std::stod(value);
    else if (key == "x0") cfg.x0 = std::stod(value);
    else if (key == "coef-c") cfg.coef_c = std::stod(value);
    else if (key == "r") cfg.stability_r = std::stod(value);
    else if (key == "target") cfg.target = value;
    else if (key == "coef") cfg.elliptic_coef = value;
    else if (key == "out") cfg.out = value;
    else if (key == "deterministic") return parse_bool(value, cfg.deterministic);
    else if (key == "timestamp") return parse_bool(value, cfg.timestamp);
    else if (key == "black-box") return parse_bool(value, cfg.black_box);
    else return false;
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

// Reads a flat key=value file. Keys already set on the command line keep
// their values; keys the subcommand does not define are usage errors.
void load_config_file(CLI::App* sub, ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--config",
                                 "line " + std::to_string(lineno) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw CLI::ValidationError("--config", "unknown key '" + key + "' for this subcommand");
    if (opt->count() > 0) continue;  // command line wins
    if (!apply_config_entry(cfg, key, value))
      throw CLI::ValidationError("--config", "cannot parse value for key '" + key + "'");
  }
}

void add_space_options(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--basis", cfg.family, "Basis family")
      ->transform(CLI::CheckedTransformer(kFamilyNames, CLI::ignore_case));
  sub->add_option("--space", cfg.space, "Index-set kind: tp or td")
      ->transform(CLI::CheckedTransformer(kSpaceNames, CLI::ignore_case));
  sub->add_option("--dim", cfg.dim, "Parameter dimension")->check(CLI::PositiveNumber);
  sub->add_option("--qmin", cfg.q_min, "Smallest order in the sweep");
  sub->add_option("--qmax", cfg.q_max, "Largest order in the sweep");
  sub->add_option("--rule", cfg.plan_rule, "Sample-count rule: linear (m=cN) or quadratic (m=cN^2)")
      ->transform(CLI::CheckedTransformer(kRuleNames, CLI::ignore_case));
  sub->add_option("--c", cfg.plan_c, "Sample-count multiplier")->check(CLI::PositiveNumber);
}

void add_distribution_options(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--dist", cfg.dist, "Sampling distribution")
      ->transform(CLI::CheckedTransformer(kDistNames, CLI::ignore_case));
  sub->add_option("--map-r", cfg.map_r, "Mapping exponent: 0 logarithmic, 1 algebraic")
      ->check(CLI::Range(0, 1));
  sub->add_option("--L", cfg.L, "Mapping parameter")->check(CLI::PositiveNumber);
}

void add_scaling_options(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--scaling", cfg.scaling, "Scaling-factor rule")
      ->transform(CLI::CheckedTransformer(kScalingNames, CLI::ignore_case));
  sub->add_option("--M", cfg.support_radius, "Effective support radius of the target")
      ->check(CLI::PositiveNumber);
  sub->add_option("--mu", cfg.mu, "Quantile level in (0,1]");
}

int write_table(const CsvTable& table, const std::string& out) {
  const std::string text = table.render();
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot open output file " << out << "\n";
    return 2;
  }
  file << text;
  return 0;
}

int run_selftest() {
  // Tiny instances of every experiment; verifies the CSV schemas stay fixed.
  ExperimentConfig cond;
  cond.command = "condnum";
  cond.q_min = 0;
  cond.q_max = 1;
  cond.reps = 2;
  cond.seed = 7;
  CsvTable cond_table = run_condition_experiment(cond);
  if (cond_table.columns != csv_columns("condnum", 1) || cond_table.rows.size() != 2)
    throw ConvergenceError("selftest: condnum schema mismatch");

  ExperimentConfig conv;
  conv.command = "converge";
  conv.q_min = 0;
  conv.q_max = 2;
  conv.plan_rule = PlanRule::Linear;
  conv.plan_c = 3.0;
  conv.n_eval = 100;
  conv.seed = 7;
  CsvTable conv_table =
      run_convergence_experiment(conv, make_target("gauss_decay", {{"p", 0.6}}, 1));
  if (conv_table.columns != csv_columns("converge", 1) || conv_table.rows.size() != 3)
    throw ConvergenceError("selftest: converge schema mismatch");
  for (const auto& row : conv_table.rows) {
    if (row.size() != conv_table.columns.size())
      throw ConvergenceError("selftest: converge row width mismatch");
  }

  StabilityCheckReport report = run_stability_check(2, 1.0, 100, 7);
  CsvTable stab_table = stability_report_csv(report);
  if (stab_table.columns != csv_columns("stability", 1) || stab_table.rows.size() != 1)
    throw ConvergenceError("selftest: stability schema mismatch");

  ExperimentConfig ode;
  ode.command = "uq-ode";
  ode.q_min = 0;
  ode.q_max = 2;
  ode.plan_rule = PlanRule::Quadratic;
  ode.plan_c = 5.0;
  ode.L = 64.0;
  ode.scaling = ScalingKind::Quantile;
  ode.support_radius = 25.0;
  ode.mu = 0.995;
  ode.seed = 7;
  CsvTable ode_table = run_uq_ode_experiment(ode);
  if (ode_table.columns != csv_columns("uq-ode", 1) || ode_table.rows.size() != 3)
    throw ConvergenceError("selftest: uq-ode schema mismatch");

  ExperimentConfig ell;
  ell.command = "uq-elliptic";
  ell.elliptic_coef = "single";
  ell.coef_c = 0.5;
  ell.q_min = 0;
  ell.q_max = 1;
  ell.plan_rule = PlanRule::Linear;
  ell.plan_c = 4.0;
  ell.n_elems = 32;
  ell.seed = 7;
  CsvTable ell_table = run_uq_elliptic_experiment(ell);
  if (ell_table.columns != csv_columns("uq-elliptic", 1) || ell_table.rows.size() != 2)
    throw ConvergenceError("selftest: uq-elliptic schema mismatch");

  std::cout << "selftest: ok\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Least-squares approximation on unbounded domains with Hermite/Laguerre "
               "function bases, mapped random evaluations and scaling factors"};
  app.require_subcommand(1);

  std::string cond_config, conv_config, stab_config, ode_config, ell_config, self_config;

  ExperimentConfig cond;
  cond.command = "condnum";
  CLI::App* cond_sub = app.add_subcommand(
      "condnum", "Mean Gram-matrix condition numbers over repeated random designs");
  add_space_options(cond_sub, cond);
  add_distribution_options(cond_sub, cond);
  cond_sub->add_option("--reps", cond.reps, "Repetitions per order")->check(CLI::PositiveNumber);
  add_output_options(cond_sub, cond, cond_config);

  ExperimentConfig conv;
  conv.command = "converge";
  conv.plan_rule = PlanRule::Quadratic;
  conv.q_max = 30;
  CLI::App* conv_sub =
      app.add_subcommand("converge", "Max-error convergence sweep for a registered target");
  add_space_options(conv_sub, conv);
  add_distribution_options(conv_sub, conv);
  add_scaling_options(conv_sub, conv);
  conv_sub->add_option("--target", conv.target, "Target function identifier");
  conv_sub->add_option("--p", conv.p, "Decay rate for gauss_decay");
  conv_sub->add_option("--beta", conv.beta, "Rate coefficient for ode_tilde");
  conv_sub->add_option("--t", conv.t, "Evaluation time for ode_tilde");
  conv_sub->add_option("--neval", conv.n_eval, "Evaluation grid size")->check(CLI::PositiveNumber);
  conv_sub->add_option("--solver", conv.solver, "Coefficient solver: qr or cholesky")
      ->transform(CLI::CheckedTransformer(kSolverNames, CLI::ignore_case));
  add_output_options(conv_sub, conv, conv_config);

  ExperimentConfig stab;
  stab.command = "stability";
  CLI::App* stab_sub =
      app.add_subcommand("stability", "Empirical check of the scaled-Gram concentration bound");
  stab_sub->add_option("--K", stab.stability_K, "Number of basis functions")
      ->check(CLI::PositiveNumber);
  stab_sub->add_option("--r", stab.stability_r, "Tail exponent in the bound 2 m^{-r}")
      ->check(CLI::PositiveNumber);
  stab_sub->add_option("--trials", stab.trials, "Number of random designs")
      ->check(CLI::Range(100, 100000000));
  add_output_options(stab_sub, stab, stab_config);

  ExperimentConfig ode;
  ode.command = "uq-ode";
  ode.plan_rule = PlanRule::Quadratic;
  ode.plan_c = 5.0;
  ode.L = 64.0;
  ode.scaling = ScalingKind::Quantile;
  ode.support_radius = 25.0;
  ode.mu = 0.995;
  ode.q_min = 0;
  ode.q_max = 20;
  CLI::App* ode_sub =
      app.add_subcommand("uq-ode", "Second moment of the exponential-decay random ODE");
  ode_sub->add_option("--beta", ode.beta, "Rate coefficient k(y) = beta*y");
  ode_sub->add_option("--t", ode.t, "Evaluation time");
  ode_sub->add_option("--qmin", ode.q_min, "Smallest order");
  ode_sub->add_option("--qmax", ode.q_max, "Largest order");
  ode_sub->add_option("--rule", ode.plan_rule, "Sample-count rule")
      ->transform(CLI::CheckedTransformer(kRuleNames, CLI::ignore_case));
  ode_sub->add_option("--c", ode.plan_c, "Sample-count multiplier")->check(CLI::PositiveNumber);
  ode_sub->add_option("--L", ode.L, "Mapping parameter (r=1 map)")->check(CLI::PositiveNumber);
  add_scaling_options(ode_sub, ode);
  ode_sub->add_flag("--black-box", ode.black_box, "Solve the ODE with RK4 instead of closed form");
  add_output_options(ode_sub, ode, ode_config);

  ExperimentConfig ell;
  ell.command = "uq-elliptic";
  ell.plan_rule = PlanRule::Linear;
  ell.plan_c = 10.0;
  ell.L = 8.0;
  ell.q_min = 0;
  ell.q_max = 6;
  ell.x0 = 0.25;
  CLI::App* ell_sub = app.add_subcommand(
      "uq-elliptic", "Weighted second-moment QoI of the 1D random elliptic problem");
  ell_sub->add_option("--coef", ell.elliptic_coef, "Coefficient kind: single or three")
      ->check(CLI::IsMember({"single", "three"}));
  ell_sub->add_option("--coef-c", ell.coef_c, "Rate of the single-parameter coefficient e^{cy}");
  ell_sub->add_option("--x0", ell.x0, "Evaluation point in (0,1)");
  ell_sub->add_option("--n-elems", ell.n_elems, "Finite-element mesh size")
      ->check(CLI::Range(2, 1 << 20));
  ell_sub->add_option("--ref-nodes", ell.ref_nodes, "Reference quadrature nodes per dimension")
      ->check(CLI::Range(2, 35));
  ell_sub->add_option("--qmin", ell.q_min, "Smallest order");
  ell_sub->add_option("--qmax", ell.q_max, "Largest order");
  ell_sub->add_option("--rule", ell.plan_rule, "Sample-count rule")
      ->transform(CLI::CheckedTransformer(kRuleNames, CLI::ignore_case));
  ell_sub->add_option("--c", ell.plan_c, "Sample-count multiplier")->check(CLI::PositiveNumber);
  ell_sub->add_option("--L", ell.L, "Mapping parameter (r=0 map)")->check(CLI::PositiveNumber);
  add_output_options(ell_sub, ell, ell_config);

  CLI::App* self_sub = app.add_subcommand("selftest", "Run quick internal schema checks");
  ExperimentConfig self;
  add_output_options(self_sub, self, self_config);

  try {
    app.parse(argc, argv);
    if (cond_sub->parsed() && !cond_config.empty()) load_config_file(cond_sub, cond, cond_config);
    if (conv_sub->parsed() && !conv_config.empty()) load_config_file(conv_sub, conv, conv_config);
    if (stab_sub->parsed() && !stab_config.empty()) load_config_file(stab_sub, stab, stab_config);
    if (ode_sub->parsed() && !ode_config.empty()) load_config_file(ode_sub, ode, ode_config);
    if (ell_sub->parsed() && !ell_config.empty()) load_config_file(ell_sub, ell, ell_config);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (cond_sub->parsed()) return write_table(run_condition_experiment(cond), cond.out);
    if (conv_sub->parsed()) {
      std::map<std::string, double> params;
      if (conv.target == "gauss_decay") params["p"] = conv.p;
      if (conv.target == "ode_tilde") {
        params["beta"] = conv.beta;
        params["t"] = conv.t;
      }
      TargetFunction target = make_target(conv.target, params, conv.dim);
      return write_table(run_convergence_experiment(conv, target), conv.out);
    }
    if (stab_sub->parsed()) {
      StabilityCheckReport report =
          run_stability_check(stab.stability_K, stab.stability_r, stab.trials, stab.seed,
                              stab.threads);
      std::cout << "K: " << report.K << "\n"
                << "r: " << report.r << "\n"
                << "trials: " << report.trials << "\n"
                << "kappa: " << format_double(report.kappa) << "\n"
                << "c_half: " << format_double(report.c_half) << "\n"
                << "tau: " << format_double(report.tau) << "\n"
                << "m_min: " << report.m_min << "\n"
                << "L_used: " << format_double(report.L_used) << "\n"
                << "violations: " << report.violation_count << "\n"
                << "violation_fraction: " << format_double(report.violation_fraction) << "\n"
                << "prob_bound: " << format_double(report.probability_bound) << "\n";
      if (!stab.out.empty()) return write_table(stability_report_csv(report), stab.out);
      return 0;
    }
    if (ode_sub->parsed()) return write_table(run_uq_ode_experiment(ode), ode.out);
    if (ell_sub->parsed()) return write_table(run_uq_elliptic_experiment(ell), ell.out);
    if (self_sub->parsed()) return run_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace ulsq
