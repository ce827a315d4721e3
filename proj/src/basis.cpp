#include "ulsq/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ulsq {

namespace {

// pi^{-1/4}, the L^2(e^{-y^2}) norm of the constant Hermite polynomial.
const double kInvQuarticRootPi = std::pow(std::numbers::pi, -0.25);

void hermite_sequence(int kmax, double y, double seed, std::span<double> out) {
  out[0] = seed;
  if (kmax >= 1) out[1] = std::numbers::sqrt2 * y * seed;
  for (int k = 1; k < kmax; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    out[ks + 1] = y * std::sqrt(2.0 / (k + 1)) * out[ks] -
                  std::sqrt(static_cast<double>(k) / (k + 1)) * out[ks - 1];
  }
}

void laguerre_sequence(int kmax, double y, double seed, std::span<double> out) {
  out[0] = seed;
  if (kmax >= 1) out[1] = (1.0 - y) * seed;
  for (int k = 1; k < kmax; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    out[ks + 1] = ((2.0 * k + 1.0 - y) * out[ks] - k * out[ks - 1]) / (k + 1);
  }
}

void check_order(int k) {
  if (k < 0) throw ContractError("basis order must be >= 0");
}

void check_laguerre_domain(double y) {
  if (!(y >= 0.0))
    throw DomainError("Laguerre families require y >= 0, got y=" + std::to_string(y));
}

}  // namespace

bool is_laguerre(BasisFamily family) {
  return family == BasisFamily::LaguerrePoly || family == BasisFamily::LaguerreFunc;
}

bool is_function_variant(BasisFamily family) {
  return family == BasisFamily::HermiteFunc || family == BasisFamily::LaguerreFunc;
}

const char* family_name(BasisFamily family) {
  switch (family) {
    case BasisFamily::HermitePoly: return "hermite-poly";
    case BasisFamily::HermiteFunc: return "hermite-func";
    case BasisFamily::LaguerrePoly: return "laguerre-poly";
    case BasisFamily::LaguerreFunc: return "laguerre-func";
  }
  return "unknown";
}

void eval_sequence(BasisFamily family, int kmax, double y, std::span<double> out) {
  check_order(kmax);
  if (out.size() < static_cast<std::size_t>(kmax) + 1)
    throw ContractError("eval_sequence: output span too short");
  switch (family) {
    case BasisFamily::HermitePoly:
      hermite_sequence(kmax, y, kInvQuarticRootPi, out);
      break;
    case BasisFamily::HermiteFunc:
      hermite_sequence(kmax, y, kInvQuarticRootPi * std::exp(-0.5 * y * y), out);
      break;
    case BasisFamily::LaguerrePoly:
      check_laguerre_domain(y);
      laguerre_sequence(kmax, y, 1.0, out);
      break;
    case BasisFamily::LaguerreFunc:
      check_laguerre_domain(y);
      laguerre_sequence(kmax, y, std::exp(-0.5 * y), out);
      break;
  }
}

namespace {

double eval_single(BasisFamily family, int k, double y) {
  check_order(k);
  std::vector<double> buf(static_cast<std::size_t>(k) + 1);
  eval_sequence(family, k, y, buf);
  return buf.back();
}

}  // namespace

double eval_hermite_poly(int k, double y) { return eval_single(BasisFamily::HermitePoly, k, y); }
double eval_hermite_func(int k, double y) { return eval_single(BasisFamily::HermiteFunc, k, y); }
double eval_laguerre_poly(int k, double y) { return eval_single(BasisFamily::LaguerrePoly, k, y); }
double eval_laguerre_func(int k, double y) { return eval_single(BasisFamily::LaguerreFunc, k, y); }

BasisSpec::BasisSpec(BasisFamily family, IndexSet indices, std::vector<double> alpha)
    : family_(family), indices_(std::move(indices)), alpha_(std::move(alpha)) {
  if (alpha_.size() != static_cast<std::size_t>(indices_.dim()))
    throw ContractError("BasisSpec: alpha must have one entry per dimension");
  for (double a : alpha_) {
    if (!(a > 0.0)) throw ContractError("BasisSpec: scaling factors must be positive");
  }
}

BasisSpec BasisSpec::unscaled(BasisFamily family, IndexSet indices) {
  std::vector<double> ones(static_cast<std::size_t>(indices.dim()), 1.0);
  return BasisSpec(family, std::move(indices), std::move(ones));
}

BasisRowEvaluator::BasisRowEvaluator(const BasisSpec& spec) : spec_(&spec) {
  const int d = spec.dim();
  offsets_.resize(static_cast<std::size_t>(d) + 1, 0);
  for (int i = 0; i < d; ++i)
    offsets_[static_cast<std::size_t>(i) + 1] =
        offsets_[static_cast<std::size_t>(i)] +
        static_cast<std::size_t>(spec.indices().max_entry(i)) + 1;
  values_.resize(offsets_.back());
}

void BasisRowEvaluator::eval(std::span<const double> point, std::span<double> row) const {
  const BasisSpec& spec = *spec_;
  const int d = spec.dim();
  if (point.size() != static_cast<std::size_t>(d))
    throw ContractError("eval_basis_row: point dimension mismatch");
  if (row.size() != spec.size()) throw ContractError("eval_basis_row: row length mismatch");

  const bool laguerre = is_laguerre(spec.family());
  for (int i = 0; i < d; ++i) {
    const auto is = static_cast<std::size_t>(i);
    const double scaled = spec.alpha()[is] * point[is];
    if (laguerre && !(scaled >= 0.0))
      throw DomainError("eval_basis_row: coordinate " + std::to_string(i) +
                        " is negative for a Laguerre family");
    eval_sequence(spec.family(), spec.indices().max_entry(i), scaled,
                  std::span<double>(values_).subspan(offsets_[is], offsets_[is + 1] - offsets_[is]));
  }

  const auto& indices = spec.indices().indices();
  for (std::size_t j = 0; j < indices.size(); ++j) {
    double prod = 1.0;
    for (int i = 0; i < d; ++i)
      prod *= values_[offsets_[static_cast<std::size_t>(i)] +
                      static_cast<std::size_t>(indices[j][i])];
    row[j] = prod;
  }
}

std::vector<double> eval_basis_row(const BasisSpec& spec, std::span<const double> point) {
  std::vector<double> row(spec.size());
  BasisRowEvaluator(spec).eval(point, row);
  return row;
}

double hermite_support_bound(int K) {
  if (K < 1) throw ContractError("hermite_support_bound: K must be >= 1");
  return std::min(40.0, std::sqrt(2.0 * K) + 16.0);
}

namespace {

double max_abs_hermite_func(int K, double y, std::vector<double>& buf) {
  eval_sequence(BasisFamily::HermiteFunc, K - 1, y, buf);
  double m = 0.0;
  for (int k = 0; k < K; ++k) m = std::max(m, std::abs(buf[static_cast<std::size_t>(k)]));
  return m;
}

}  // namespace

TailConstant estimate_tau(int K) {
  if (K < 1) throw ContractError("estimate_tau: K must be >= 1");
  const double coarse = 0.01;
  const double y_end = hermite_support_bound(K);
  const long n_coarse = std::lround(y_end / coarse);
  std::vector<double> buf(static_cast<std::size_t>(K));

  // tau starts at the first positive grid value; pushed up past every
  // violation of the |y|^{-3/2} envelope.
  double tau = coarse;
  for (long i = 1; i <= n_coarse; ++i) {
    const double y = static_cast<double>(i) * coarse;
    if (max_abs_hermite_func(K, y, buf) > std::pow(y, -1.5)) tau = y;
  }

  // Re-verify on a 10x finer grid; a late violation bumps tau to the next
  // coarse grid value and triggers another pass.
  const double fine = coarse / 10.0;
  const long n_fine = std::lround(y_end / fine);
  for (;;) {
    double worst = 0.0;
    const long start = std::lround(tau / fine) + 1;
    for (long i = start; i <= n_fine; ++i) {
      const double y = static_cast<double>(i) * fine;
      if (max_abs_hermite_func(K, y, buf) > std::pow(y, -1.5)) worst = y;
    }
    if (worst == 0.0) break;
    tau = std::ceil(worst / coarse + 1e-12) * coarse;
  }

  if (tau > y_end - 1.0)
    throw ConvergenceError("estimate_tau: audit grid exhausted; basis evaluation is suspect");
  return TailConstant{K, tau};
}

}  // namespace ulsq
