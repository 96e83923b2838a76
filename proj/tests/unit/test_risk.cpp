// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "sureid/risk.hpp"

using namespace sureid;

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

double laplace_h_ref(double x) {
  return x <= 0.0 ? 0.5 * std::exp(kSqrt2 * x) : 1.0 - 0.5 * std::exp(-kSqrt2 * x);
}

}  // namespace

TEST_CASE("risk estimate components") {
  SteinOperator K(NoiseModel::laplace());
  const auto r = unbiased_risk(K, soft_expr(2.0), 1.3);
  CHECK(r.value ==
        doctest::Approx(r.variance_term + r.g_squared + r.cross_term));
  CHECK(r.variance_term == doctest::Approx(1.0));
  CHECK(r.g_squared == doctest::Approx(std::min(1.3 * 1.3, 4.0)));

  // laplace closed shape: 1 + min(x^2, l^2) + 2(h(x-l) - h(x+l))
  for (double x = -5.0; x <= 5.0; x += 0.21) {
    const auto e = unbiased_risk(K, soft_expr(2.0), x);
    const double want = 1.0 + std::min(x * x, 4.0) +
                        2.0 * (laplace_h_ref(x - 2.0) - laplace_h_ref(x + 2.0));
    CHECK(e.value == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("gaussian case recovers the classical formula") {
  SteinOperator K(NoiseModel::normal(1.0));
  for (double lambda : {0.7, 1.5, 2.0}) {
    const auto d = soft_expr(lambda);
    for (double x = -4.003; x <= 4.0; x += 0.097) {
      const double want = 1.0 + std::min(x * x, lambda * lambda) -
                          2.0 * (std::abs(x) < lambda ? 1.0 : 0.0);
      CHECK(unbiased_risk(K, d, x).value == doctest::Approx(want).epsilon(1e-13));
    }
  }
}

TEST_CASE("large-threshold limit") {
  // at fixed x, h(x - l) -> 0 and h(x + l) -> variance, so the estimate
  // approaches x^2 - variance (the risk of the zero estimator, unbiasedly)
  for (const auto& m : {NoiseModel::laplace(), NoiseModel::centered_gamma(2.0)}) {
    SteinOperator K(m);
    const double x = 1.3;
    const auto r = unbiased_risk(K, soft_expr(60.0), x);
    CHECK(r.value ==
          doctest::Approx(x * x - m.variance()).epsilon(1e-9));
  }
}

TEST_CASE("noncentered models are refused") {
  SteinOperator K(shift(NoiseModel::laplace(), 0.5));
  CHECK_THROWS_AS((void)unbiased_risk(K, soft_expr(1.0), 0.0),
                  std::invalid_argument);
}

TEST_CASE("uniform kernel h") {
  CHECK(uniform_h(-1.0) == 0.0);
  CHECK(uniform_h(0.0) == 0.0);
  CHECK(uniform_h(1.0) == 0.5);
  CHECK(uniform_h(3.0) == uniform_h(1.0));
  for (double x : {0.3, 1.9, 2.7, 5.1, 11.4})
    CHECK(uniform_h(x + 2.0) == doctest::Approx(uniform_h(x)).epsilon(1e-14));
}

TEST_CASE("uniform r") {
  CHECK(uniform_r(0.0) == doctest::Approx(1.0 / 6.0));
  CHECK(uniform_r(1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(uniform_r(-1.0) == 0.0);
  CHECK(uniform_r(-2.0) == 0.0);
  CHECK(uniform_r(5.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("uniform h averages to r") {
  // (1/2) integral over (-1,1) of h(x + theta) dx = r(theta); the integrand
  // is piecewise quadratic with kinks at even integers minus theta
  for (double theta : {-0.5, 0.0, 0.8}) {
    std::vector<double> bps;
    for (int k = -2; k <= 4; k += 2) bps.push_back(k - theta);
    const auto got = integrate_gk_split(
        [theta](double x) { return 0.5 * uniform_h(x + theta); }, -1.0, 1.0, bps,
        QuadOptions{1e-13, 1e-13, 4000});
    CHECK(std::abs(got.value - uniform_r(theta)) < 1e-10);
  }
}

TEST_CASE("uniform complement kernel") {
  // h_minus := variance - h satisfies the mirrored averaging identity
  // (1/2) integral of h_minus(x + theta) dx = variance - r(theta), the
  // consequence of E[X (X+theta)] = variance
  const double var = 1.0 / 3.0;
  for (double theta : {-0.7, 0.0, 0.4, 1.2}) {
    std::vector<double> bps;
    for (int k = -2; k <= 4; k += 2) bps.push_back(static_cast<double>(k) - theta);
    bps.push_back(-theta);
    const double avg =
        integrate_gk_split(
            [theta, var](double x) { return 0.5 * (var - uniform_h(x + theta)); },
            -1.0, 1.0, bps, QuadOptions{1e-13, 1e-13, 4000})
            .value;
    CHECK(avg == doctest::Approx(var - uniform_r(theta)).epsilon(1e-12));
  }
}

TEST_CASE("risk estimates carry their provenance") {
  SteinOperator K(NoiseModel::laplace());
  const auto r = unbiased_risk(K, soft_expr(2.0), 0.5);
  CHECK(r.model.find("laplace") != std::string::npos);
  const auto u = unbiased_risk_uniform_soft(1.0, 2.0, 0.5);
  CHECK(u.model.find("uniform") != std::string::npos);
  CHECK(u.estimator.find("soft") != std::string::npos);
}

TEST_CASE("uniform soft-threshold risk") {
  SUBCASE("components and scaling") {
    const auto r = unbiased_risk_uniform_soft(1.0, 1.0, 0.4);
    CHECK(r.variance_term == doctest::Approx(1.0 / 3.0));
    CHECK(r.g_squared == doctest::Approx(0.16));
    CHECK(r.value ==
          doctest::Approx(r.variance_term + r.g_squared + r.cross_term));

    // halfwidth sqrt(3) has unit variance
    const auto u = unbiased_risk_uniform_soft(std::sqrt(3.0), 2.0, 0.0);
    CHECK(u.variance_term == doctest::Approx(1.0));
  }
  SUBCASE("unbiasedness by dual quadrature") {
    const double theta = 0.3, lambda = 1.0;
    const auto d = soft_expr(lambda);
    // E rhat(X + theta)
    std::vector<double> bps;
    for (int k = -4; k <= 6; ++k) bps.push_back(static_cast<double>(k) - theta);
    const double lhs =
        integrate_gk_split(
            [&](double x) {
              return 0.5 * unbiased_risk_uniform_soft(1.0, lambda, x + theta).value;
            },
            -1.0, 1.0, bps, QuadOptions{1e-12, 1e-12, 8000})
            .value;
    // E (T(X + theta) - theta)^2
    const double rhs =
        integrate_gk_split(
            [&](double x) {
              const double e = d(x + theta) - theta;
              return 0.5 * e * e;
            },
            -1.0, 1.0, bps, QuadOptions{1e-12, 1e-12, 8000})
            .value;
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
  SUBCASE("large-threshold limit holds in period average") {
    // the uniform kernel is 2-periodic, so h(x + lambda) has no pointwise
    // limit; averaged over one period of lambda the estimate approaches
    // x^2 - variance, the unbiased value for the zero estimator
    const double x = 0.4;
    const double avg =
        integrate_gk_split(
            [x](double lambda) {
              return 0.5 * unbiased_risk_uniform_soft(1.0, lambda, x).value;
            },
            50.0, 52.0, std::vector<double>{52.0 - x - 1.0, 52.0 - x},
            QuadOptions{1e-12, 1e-12, 4000})
            .value;
    CHECK(avg == doctest::Approx(x * x - 1.0 / 3.0).epsilon(1e-9));
  }
}

TEST_CASE("expected risk oracle") {
  SUBCASE("identity estimator has risk variance") {
    for (const auto& m : {NoiseModel::normal(1.0), NoiseModel::laplace(),
                          NoiseModel::uniform(1.5)}) {
      const auto r = expected_risk(m, identity_expr(), 0.0);
      CHECK(!r.monte_carlo);
      CHECK(r.value == doctest::Approx(m.variance()).epsilon(1e-9));
    }
  }
  SUBCASE("zero estimator has risk theta^2") {
    const EstimatorExpr zero{};
    const auto r = expected_risk(NoiseModel::laplace(), zero, 1.7);
    CHECK(r.value == doctest::Approx(1.7 * 1.7).epsilon(1e-10));
  }
  SUBCASE("matches the mean of the unbiased estimate") {
    const auto m = NoiseModel::laplace();
    SteinOperator K(m);
    const auto d = soft_expr(2.0);
    const double theta = 1.0;
    const auto dv = density(m);
    REQUIRE(dv);
    std::vector<double> bps;
    for (double k : d.knots()) bps.push_back(k - theta);
    const double mean_estimate =
        integrate_gk_split(
            [&](double x) {
              return unbiased_risk(K, d, x + theta).value * dv->pdf(x);
            },
            dv->lo, dv->hi, bps, QuadOptions{1e-11, 1e-11, 8000})
            .value;
    const auto oracle = expected_risk(m, d, theta, QuadOptions{1e-11, 1e-11, 8000});
    CHECK(std::abs(mean_estimate - oracle.value) < 1e-7);
  }
  SUBCASE("falls back to Monte Carlo without a density") {
    const auto cp = shift(NoiseModel::compound_poisson(2.0, gaussian_jumps(0.0, 1.0)),
                          0.0);
    const auto r = expected_risk(cp, identity_expr(), 0.0, {}, 200000, 3);
    CHECK(r.monte_carlo);
    CHECK(r.error > 0.0);
    CHECK(std::abs(r.value - cp.variance()) < 5.0 * r.error);
  }
}

TEST_CASE("multivariate coordinatewise risk") {
  const QuadOptions opts{1e-10, 1e-10, 4000};
  SUBCASE("separable soft thresholding splits into univariate terms") {
    const std::vector<NoiseModel> models = {NoiseModel::laplace(),
                                            NoiseModel::laplace()};
    const auto g = residual(soft_expr(1.5));
    const std::vector<CoordResidual> gs = {
        [&g](std::span<const double> v) { return g(v[0]); },
        [&g](std::span<const double> v) { return g(v[1]); },
    };
    const std::vector<double> x = {0.8, -2.4};
    const double got = multivariate_risk(models, gs, x, opts);

    SteinOperator K(models[0]);
    const double want = unbiased_risk(K, soft_expr(1.5), x[0]).value +
                        unbiased_risk(K, soft_expr(1.5), x[1]).value;
    CHECK(got == doctest::Approx(want).epsilon(1e-7));
  }
  SUBCASE("identity estimator sums the variances") {
    const std::vector<NoiseModel> models = {NoiseModel::laplace(),
                                            NoiseModel::sech()};
    const std::vector<CoordResidual> gs = {
        [](std::span<const double>) { return 0.0; },
        [](std::span<const double>) { return 0.0; },
    };
    const std::vector<double> x = {0.3, 1.1};
    CHECK(multivariate_risk(models, gs, x, opts) ==
          doctest::Approx(models[0].variance() + models[1].variance())
              .epsilon(1e-9));
  }
}

TEST_CASE("risk curve CSV row format") {
  RiskEstimate r;
  r.x = 0.5;
  r.value = -1.25;
  r.variance_term = 1.0;
  r.g_squared = 0.25;
  r.cross_term = -2.5;
  std::ostringstream os;
  write_risk_curve_row(os, r);
  CHECK(os.str() == "0.5,-1.25,1,0.25,-2.5\n");
}
