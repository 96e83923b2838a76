// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include <doctest.h>

#include <cmath>
#include <random>

#include "sureid/errors.hpp"
#include "sureid/estimator.hpp"
#include "sureid/quadrature.hpp"

using namespace sureid;

namespace {

double soft_threshold(double x, double lambda) {
  return std::copysign(std::max(std::abs(x) - lambda, 0.0), x);
}

double mid_threshold(double x, double lambda) {
  if (std::abs(x) >= lambda) return x;
  return 2.0 * std::max(std::abs(x) - 0.5 * lambda, 0.0) * (x < 0 ? -1.0 : 1.0);
}

}  // namespace

TEST_CASE("building block conventions") {
  const auto hp = BuildingBlock::hinge_plus(1.0);
  const auto hm = BuildingBlock::hinge_minus(1.0);
  CHECK(hp(3.0) == 2.0);
  CHECK(hp(0.0) == 0.0);
  CHECK(hm(0.0) == -1.0);
  CHECK(hm(3.0) == 0.0);

  // identity(x) = hinge_plus(0)(x) + hinge_minus(0)(x), exactly
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> ud(-50.0, 50.0);
  const auto p0 = BuildingBlock::hinge_plus(0.0);
  const auto m0 = BuildingBlock::hinge_minus(0.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = ud(gen);
    CHECK(p0(x) + m0(x) == x);
  }
}

TEST_CASE("hinge identity: plus + minus = x - knot, exactly") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> ud(-20.0, 20.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = ud(gen);
    const double lambda = ud(gen);
    const double hp = BuildingBlock::hinge_plus(lambda)(x);
    const double hm = BuildingBlock::hinge_minus(lambda)(x);
    CHECK(hp + hm == x - lambda);
  }
}

TEST_CASE("soft_expr reproduces soft thresholding") {
  CHECK(soft_expr(2.0)(3.0) == 1.0);
  CHECK(soft_expr(2.0)(-1.0) == 0.0);
  CHECK(soft_expr(2.0)(2.0) == 0.0);

  for (double lambda : {0.5, 1.0, 2.0, 3.7}) {
    const auto e = soft_expr(lambda);
    for (double x = -3.0 * lambda; x <= 3.0 * lambda; x += 0.0625 * lambda) {
      CHECK(e(x) == doctest::Approx(soft_threshold(x, lambda)).epsilon(1e-15));
    }
  }
}

TEST_CASE("mid_expr reproduces mid thresholding") {
  CHECK(mid_expr(2.0)(1.5) == doctest::Approx(1.0));
  CHECK(mid_expr(2.0)(0.0) == 0.0);
  CHECK(mid_expr(2.0)(0.5) == 0.0);
  CHECK(mid_expr(2.0)(-0.5) == 0.0);

  for (double lambda : {0.8, 2.0}) {
    const auto e = mid_expr(lambda);
    for (double x = -3.0 * lambda; x <= 3.0 * lambda; x += 0.03125 * lambda) {
      CHECK(e(x) == doctest::Approx(mid_threshold(x, lambda)).epsilon(1e-13));
      if (std::abs(x) >= lambda) CHECK(e(x) == doctest::Approx(x));
    }
  }
}

TEST_CASE("residual extracts g from d = id + g") {
  const auto soft = soft_expr(2.0);
  const auto g = residual(soft);
  for (const auto& [coeff, block] : g.terms)
    CHECK(block.kind != BuildingBlock::Kind::identity);
  CHECK(g(5.0) == doctest::Approx(-2.0));
  CHECK(g(0.5) == doctest::Approx(-0.5));

  // g^2 = min(x^2, lambda^2) for the soft residual
  for (double x = -7.0; x <= 7.0; x += 0.11) {
    const double gx = g(x);
    CHECK(gx * gx ==
          doctest::Approx(std::min(x * x, 4.0)).epsilon(1e-13));
  }

  CHECK(residual(identity_expr()).terms.empty());
  CHECK(residual(identity_expr())(13.0) == 0.0);
}

TEST_CASE("knots are collected and deduplicated") {
  const auto k = mid_expr(2.0).knots();
  REQUIRE(k.size() == 5);  // -2, -1, 0, 1, 2
  CHECK(k.front() == -2.0);
  CHECK(k.back() == 2.0);
}

TEST_CASE("smooth_expr") {
  SUBCASE("quadratic target") {
    const auto r = smooth_expr(0.0, [](double) { return 2.0; }, 4.0, 256);
    double max_err = 0.0;
    for (double x = 0.0; x <= 4.0; x += 0.03)
      max_err = std::max(max_err, std::abs(r.expr(x) - x * x));
    CHECK(max_err < 1e-3);
    CHECK(r.max_error < 1e-3);
  }
  SUBCASE("pure slope gives a single hinge") {
    const auto r = smooth_expr(1.0, [](double) { return 0.0; }, 2.0, 64);
    REQUIRE(r.expr.terms.size() == 1);
    CHECK(r.expr.terms[0].second.kind == BuildingBlock::Kind::hinge_plus);
    CHECK(r.expr.terms[0].second.value == 0.0);
    CHECK(r.expr(1.3) == doctest::Approx(1.3));
  }
  SUBCASE("refinement study on a mollified hinge") {
    // g''(y) = gaussian bump at 1; the target is the exact integral form
    const double s = 0.05;
    auto g2 = [s](double y) {
      const double z = (y - 1.0) / s;
      return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * M_PI));
    };
    auto target = [&](double x) {
      if (x <= 0.0) return 0.0;
      return integrate_gk([&](double y) { return std::max(x - y, 0.0) * g2(y); },
                          0.0, 2.0, QuadOptions{1e-12, 1e-12, 4000})
          .value;
    };
    double prev = 1e300;
    for (int nodes : {32, 128, 512}) {
      const auto r = smooth_expr(0.0, g2, 2.0, nodes);
      double err = 0.0;
      for (double x = 0.1; x <= 2.0; x += 0.057)
        err = std::max(err, std::abs(r.expr(x) - target(x)));
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-4);
  }
  SUBCASE("non-integrable curvature is an error") {
    CHECK_THROWS_AS(
        (void)smooth_expr(0.0, [](double y) { return 1.0 / y; }, 1.0, 64),
        quadrature_error);
  }
}

TEST_CASE("estimator JSON parsing") {
  const auto soft = estimator_from_json(R"({"type":"soft","lambda":2.0})");
  CHECK(soft(3.0) == doctest::Approx(1.0));
  const auto mid = estimator_from_json(R"({"type":"mid","lambda":2.0})");
  CHECK(mid(1.5) == doctest::Approx(1.0));

  const auto custom = estimator_from_json(
      R"({"terms":[[1.0,{"kind":"identity"}],[-0.5,{"kind":"hinge_plus","knot":1.0}],
                   [2.0,{"kind":"constant","value":3.0}]]})");
  CHECK(custom(2.0) == doctest::Approx(2.0 - 0.5 + 6.0));

  CHECK_THROWS_AS((void)estimator_from_json(R"({"type":"hard","lambda":1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)estimator_from_json(R"({"type":"soft","lambda":1,"x":2})"),
      std::invalid_argument);
}
