#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ulsq/basis.hpp"
#include "ulsq/linalg.hpp"

using namespace ulsq;

namespace {

const double kInvQuarticRootPi = std::pow(std::numbers::pi, -0.25);

}  // namespace

TEST_CASE("hermite polynomial point values") {
  CHECK(eval_hermite_poly(0, 0.0) == doctest::Approx(0.7511255444649425).epsilon(1e-12));
  CHECK(eval_hermite_poly(0, 123.4) == doctest::Approx(0.7511255444649425).epsilon(1e-12));
  CHECK(eval_hermite_poly(1, 0.0) == 0.0);
  CHECK(eval_hermite_poly(2, 0.0) == doctest::Approx(-0.5311259660135984).epsilon(1e-12));
}

TEST_CASE("hermite function point values") {
  CHECK(eval_hermite_func(0, 0.0) == doctest::Approx(0.7511255444649425).epsilon(1e-12));
  CHECK(eval_hermite_func(3, 0.0) == 0.0);
  CHECK(eval_hermite_func(25, 200.0) == 0.0);  // gaussian factor underflows
}

TEST_CASE("laguerre polynomial point values") {
  CHECK(eval_laguerre_poly(0, 7.3) == 1.0);
  CHECK(eval_laguerre_poly(1, 1.0) == 0.0);
  CHECK(eval_laguerre_poly(2, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (int k = 0; k <= 12; ++k) CHECK(eval_laguerre_poly(k, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_laguerre_poly(3, -0.5), DomainError);
}

TEST_CASE("laguerre function point values") {
  CHECK(eval_laguerre_func(0, 0.0) == 1.0);
  CHECK(eval_laguerre_func(1, 2.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
  CHECK(std::abs(eval_laguerre_func(5, 800.0)) < 1e-150);  // zero at working precision
  CHECK_THROWS_AS(eval_laguerre_func(2, -1e-9), DomainError);
}

TEST_CASE("polynomial orthonormality under 64-node gauss rules") {
  QuadratureRule hermite = golub_welsch(64, QuadratureWeight::GaussHermite);
  QuadratureRule laguerre = golub_welsch(64, QuadratureWeight::GaussLaguerre);
  std::vector<double> hi(21), hj(21);
  for (int i = 0; i <= 20; ++i) {
    for (int j = i; j <= 20; ++j) {
      double sh = 0.0;
      double sl = 0.0;
      for (std::size_t k = 0; k < hermite.nodes.size(); ++k) {
        sh += hermite.weights[k] * eval_hermite_poly(i, hermite.nodes[k]) *
              eval_hermite_poly(j, hermite.nodes[k]);
        sl += laguerre.weights[k] * eval_laguerre_poly(i, laguerre.nodes[k]) *
              eval_laguerre_poly(j, laguerre.nodes[k]);
      }
      const double expected = i == j ? 1.0 : 0.0;
      CHECK(std::abs(sh - expected) < 1e-10);
      CHECK(std::abs(sl - expected) < 1e-10);
    }
  }
}

TEST_CASE("function orthonormality under composite quadrature") {
  // Accumulate the full 21x21 Gram of both function families with composite
  // Simpson, evaluating each order sequence once per grid point.
  auto gram_entries = [](BasisFamily family, double lo, double hi, std::size_t n) {
    std::vector<double> gram(21 * 21, 0.0);
    std::vector<double> row(21);
    const double h = (hi - lo) / static_cast<double>(n);
    for (std::size_t s = 0; s <= n; ++s) {
      const double y = lo + h * static_cast<double>(s);
      eval_sequence(family, 20, y, row);
      const double w = (s == 0 || s == n) ? 1.0 : (s % 2 ? 4.0 : 2.0);
      for (int i = 0; i <= 20; ++i)
        for (int j = i; j <= 20; ++j)
          gram[static_cast<std::size_t>(i) * 21 + static_cast<std::size_t>(j)] +=
              w * row[static_cast<std::size_t>(i)] * row[static_cast<std::size_t>(j)];
    }
    for (double& v : gram) v *= h / 3.0;
    return gram;
  };

  std::vector<double> hermite = gram_entries(BasisFamily::HermiteFunc, -40.0, 40.0, 80000);
  std::vector<double> laguerre = gram_entries(BasisFamily::LaguerreFunc, 0.0, 400.0, 400000);
  for (int i = 0; i <= 20; ++i) {
    for (int j = i; j <= 20; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      CHECK(std::abs(hermite[static_cast<std::size_t>(i) * 21 + static_cast<std::size_t>(j)] -
                     expected) < 1e-8);
      CHECK(std::abs(laguerre[static_cast<std::size_t>(i) * 21 + static_cast<std::size_t>(j)] -
                     expected) < 1e-8);
    }
  }
}

TEST_CASE("function variants stay uniformly bounded") {
  for (int k = 0; k <= 40; ++k) {
    for (double y = 0.0; y <= 50.0; y += 0.01) {
      const double h = eval_hermite_func(k, y);
      CHECK(h * h < 1.0);
      const double l = eval_laguerre_func(k, y);
      CHECK(l * l <= 1.0);
    }
  }
}

TEST_CASE("function variant equals exponential times polynomial where both are finite") {
  for (int k : {0, 1, 2, 5, 11, 20, 30}) {
    for (double y = -24.0; y <= 24.0; y += 0.375) {
      const double via_poly = std::exp(-0.5 * y * y) * eval_hermite_poly(k, y);
      const double direct = eval_hermite_func(k, y);
      if (!std::isfinite(via_poly) || std::abs(direct) < 1e-250) continue;
      CHECK(direct == doctest::Approx(via_poly).epsilon(1e-12));
    }
    for (double y = 0.0; y <= 60.0; y += 0.5) {
      const double via_poly = std::exp(-0.5 * y) * eval_laguerre_poly(k, y);
      const double direct = eval_laguerre_func(k, y);
      if (!std::isfinite(via_poly) || std::abs(direct) < 1e-250) continue;
      CHECK(direct == doctest::Approx(via_poly).epsilon(1e-12));
    }
  }
}

TEST_CASE("basis row on a td set in two dimensions") {
  IndexSet set = build_index_set(SpaceKind::TotalDegree, 1, 2);
  BasisSpec spec = BasisSpec::unscaled(BasisFamily::HermiteFunc, set);
  std::vector<double> point{0.0, 0.0};
  std::vector<double> row = eval_basis_row(spec, point);
  REQUIRE(row.size() == 3);  // order: (0,0), (0,1), (1,0)
  CHECK(row[0] == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(row[1] == 0.0);
  CHECK(row[2] == 0.0);
}

TEST_CASE("identity scaling matches the unscaled row bit for bit") {
  IndexSet set = build_index_set(SpaceKind::TotalDegree, 6, 2);
  BasisSpec unscaled = BasisSpec::unscaled(BasisFamily::HermiteFunc, set);
  BasisSpec scaled(BasisFamily::HermiteFunc, set, {1.0, 1.0});
  std::vector<double> point{0.71, -1.92};
  CHECK(eval_basis_row(unscaled, point) == eval_basis_row(scaled, point));
}

TEST_CASE("scaling dilates the evaluation point") {
  IndexSet set = build_index_set(SpaceKind::TotalDegree, 4, 1);
  BasisSpec scaled(BasisFamily::HermiteFunc, set, {2.0});
  BasisSpec unscaled = BasisSpec::unscaled(BasisFamily::HermiteFunc, set);
  std::vector<double> p1{1.3};
  std::vector<double> p2{2.6};
  std::vector<double> a = eval_basis_row(scaled, p1);
  std::vector<double> b = eval_basis_row(unscaled, p2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("tensorized rows at d=1 match the scalar evaluators") {
  IndexSet set = build_index_set(SpaceKind::TotalDegree, 7, 1);
  for (BasisFamily family : {BasisFamily::HermitePoly, BasisFamily::HermiteFunc,
                             BasisFamily::LaguerrePoly, BasisFamily::LaguerreFunc}) {
    BasisSpec spec = BasisSpec::unscaled(family, set);
    const double y = is_laguerre(family) ? 1.7 : -1.7;
    std::vector<double> row = eval_basis_row(spec, std::vector<double>{y});
    std::vector<double> expected(8);
    eval_sequence(family, 7, y, expected);
    for (std::size_t k = 0; k < row.size(); ++k) CHECK(row[k] == expected[k]);
  }
}

TEST_CASE("laguerre rows reject negative coordinates with the offending index") {
  IndexSet set = build_index_set(SpaceKind::TotalDegree, 2, 3);
  BasisSpec spec = BasisSpec::unscaled(BasisFamily::LaguerreFunc, set);
  std::vector<double> point{0.5, -0.25, 1.0};
  CHECK_THROWS_WITH_AS(eval_basis_row(spec, point),
                       doctest::Contains("coordinate 1"), DomainError);
}

TEST_CASE("tail constant: small orders") {
  TailConstant one = estimate_tau(1);
  CHECK(one.basis_count == 1);
  CHECK(one.tau <= 2.0);
  // measured once with an independent scan and frozen
  CHECK(estimate_tau(10).tau == doctest::Approx(4.99).epsilon(1e-9));
}

TEST_CASE("tail constant grows with the basis count") {
  double prev = 0.0;
  for (int k = 1; k <= 14; ++k) {
    const double tau = estimate_tau(k).tau;
    CHECK(tau >= prev);
    prev = tau;
  }
}

TEST_CASE("tail bound holds on an independent fine grid") {
  for (int k : {1, 3, 10}) {
    const double tau = estimate_tau(k).tau;
    // independent audit: polynomial route times the gaussian factor
    for (double y = tau + 0.003; y <= 42.0; y += 0.003) {
      double worst = 0.0;
      for (int i = 0; i < k; ++i) {
        const double v = std::abs(std::exp(-0.5 * y * y) * eval_hermite_poly(i, y));
        worst = std::max(worst, std::isfinite(v) ? v : 0.0);
      }
      CHECK(worst <= std::pow(y, -1.5) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("tail constant for one function matches the analytic crossing") {
  // pi^{-1/4} e^{-y^2/2} stays below y^{-3/2} everywhere: the maximizer of
  // y^{3/2} e^{-y^2/2} is y = sqrt(3/2) where the product is ~0.48 < 1.
  const double y = std::sqrt(1.5);
  CHECK(kInvQuarticRootPi * std::exp(-0.5 * y * y) * std::pow(y, 1.5) < 1.0);
  CHECK(estimate_tau(1).tau == doctest::Approx(0.01));
}
