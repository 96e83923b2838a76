// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include <doctest.h>

#include <cmath>
#include <vector>

#include "sureid/errors.hpp"
#include "sureid/mc.hpp"
#include "sureid/stein_kernel.hpp"

using namespace sureid;

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// unit-variance Laplace hinge kernel, written out independently
double laplace_h_ref(double x) {
  return x <= 0.0 ? 0.5 * std::exp(kSqrt2 * x) : 1.0 - 0.5 * std::exp(-kSqrt2 * x);
}

const double kHingeKink[] = {0.0};

}  // namespace

TEST_CASE("laplace hinge kernel closed form") {
  const auto h = hinge_kernel(NoiseModel::laplace());
  CHECK(h(0.0) == 0.5);
  for (double x : {-2.0, -0.5, 0.3, 1.0, 4.2})
    CHECK(h(x) == doctest::Approx(laplace_h_ref(x)).epsilon(1e-15));
  CHECK(h(40.0) == doctest::Approx(1.0));
  CHECK(h(-40.0) == doctest::Approx(0.0));
}

TEST_CASE("gamma hinge kernel pinned against quadrature") {
  const auto m = NoiseModel::centered_gamma(2.0);
  const auto h = hinge_kernel(m);
  // assembled closed form: t e^x below zero, t above
  CHECK(h(-1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(h(0.5) == 2.0);
  CHECK(h(40.0) == doctest::Approx(2.0));

  auto g0p = [](double u) { return std::max(u, 0.0); };
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    const auto q = levy_K(m, g0p, x, kHingeKink, nullptr,
                          QuadOptions{1e-11, 1e-11, 4000});
    CHECK(h(x) == doctest::Approx(q.value).epsilon(1e-9));
  }
}

TEST_CASE("mirrored gamma kernel (negative scale)") {
  const auto m = scale(NoiseModel::centered_gamma(2.0), -0.8);
  const auto h = hinge_kernel(m);
  CHECK(h(1e9) == doctest::Approx(m.variance()));
  CHECK(h(-1e9) == 0.0);
  auto g0p = [](double u) { return std::max(u, 0.0); };
  const double kink[] = {0.0};
  for (double x = -5.0; x <= 5.0; x += 0.37) {
    const double q =
        levy_K(m, g0p, x, kink, nullptr, QuadOptions{1e-11, 1e-11, 4000}).value;
    CHECK(h(x) == doctest::Approx(q).epsilon(1e-10));
  }
  SteinOperator K(m);
  const auto chk = stein_identity_quadrature(K, residual(soft_expr(1.0)), 0.6,
                                             QuadOptions{1e-10, 1e-10, 6000});
  CHECK(chk.gap() < 1e-8);
}

TEST_CASE("convolved law passes the identity by Monte Carlo") {
  // no closed density: the sampler runs through the compound-Poisson
  // approximation of the merged jump measure
  const auto m = convolve(NoiseModel::laplace(), NoiseModel::centered_gamma(1.0));
  SteinOperator K(m);
  const auto r = mc_stein_check(K, residual(soft_expr(1.5)), 0.3, 400000, 99);
  CHECK(std::abs(r.lhs - r.rhs) < 4.0 * r.se);
}

TEST_CASE("tabulated kernel agrees with the laplace closed form") {
  const auto tab = HingeKernel::tabulated(levy_view(NoiseModel::laplace()), {});
  CHECK(!tab.closed_form());
  double max_err = 0.0;
  for (double x = -12.0; x <= 12.0; x += 0.0173)
    max_err = std::max(max_err, std::abs(tab(x) - laplace_h_ref(x)));
  CHECK(max_err < 1e-10);
}

TEST_CASE("hinge kernel limits and monotonicity for quadrature models") {
  for (const auto& m : {NoiseModel::sech(),
                        shift(NoiseModel::compound_poisson(
                                  2.0, gaussian_jumps(0.3, 0.7)),
                              -0.6)}) {
    const auto h = hinge_kernel(m);
    CHECK(h(-1e6) == 0.0);
    CHECK(h(1e6) == doctest::Approx(m.variance()));
    double prev = -1.0;
    for (double x = -15.0; x <= 15.0; x += 0.05) {
      const double v = h(x);
      CHECK(v >= prev - 1e-12);
      CHECK(v >= 0.0);
      CHECK(v <= m.variance() + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("hinge kernel preconditions") {
  CHECK_THROWS_AS((void)hinge_kernel(NoiseModel::uniform()),
                  unsupported_model_error);
  CHECK_THROWS_AS((void)hinge_kernel(shift(NoiseModel::laplace(), 1.0)),
                  std::invalid_argument);
}

TEST_CASE("apply_K on the building blocks") {
  SUBCASE("identity maps to the variance") {
    for (const auto& m :
         {NoiseModel::normal(1.0), NoiseModel::laplace(),
          NoiseModel::centered_gamma(2.0), NoiseModel::sech()}) {
      SteinOperator K(m);
      for (double x : {-3.0, 0.0, 1.7})
        CHECK(K.apply(identity_expr(), x) == doctest::Approx(m.variance()));
    }
  }
  SUBCASE("constants map to zero for centered models") {
    SteinOperator K(NoiseModel::laplace());
    EstimatorExpr c{{{1.0, BuildingBlock::constant(5.0)}}};
    CHECK(K.apply(c, 0.3) == 0.0);
  }
  SUBCASE("soft residual reduces to a kernel difference") {
    SteinOperator K(NoiseModel::laplace());
    const auto g = residual(soft_expr(2.0));
    for (double x = -6.0; x <= 6.0; x += 0.23) {
      const double want = K.hinge(x - 2.0) - K.hinge(x + 2.0);
      CHECK(K.apply(g, x) == doctest::Approx(want).epsilon(1e-13));
    }
  }
  SUBCASE("hinge complement sums to the variance") {
    for (const auto& m :
         {NoiseModel::normal(1.3), NoiseModel::laplace(),
          NoiseModel::centered_gamma(2.0), NoiseModel::sech()}) {
      SteinOperator K(m);
      EstimatorExpr hp{{{1.0, BuildingBlock::hinge_plus(0.0)}}};
      EstimatorExpr hm{{{1.0, BuildingBlock::hinge_minus(0.0)}}};
      for (double x : {-2.3, -0.1, 0.0, 0.9, 3.1})
        CHECK(K.apply(hp, x) + K.apply(hm, x) ==
              doctest::Approx(m.variance()).epsilon(1e-12));
    }
  }
  SUBCASE("gaussian reduction: K is the scaled right derivative") {
    SteinOperator K(NoiseModel::normal(1.0));
    const auto g = residual(soft_expr(2.0));
    CHECK(K.apply(g, 0.0) == doctest::Approx(-1.0));
    for (double x : {-3.0, -2.0, -0.5, 0.0, 1.99, 2.0, 2.5})
      CHECK(K.apply(g, x) == doctest::Approx(g.right_derivative(x)));
    const auto gm = residual(mid_expr(2.0));
    for (double x : {-2.5, -1.0, -0.2, 0.0, 0.7, 1.0, 1.5, 2.0, 3.0})
      CHECK(K.apply(gm, x) == doctest::Approx(gm.right_derivative(x)));
  }
}

TEST_CASE("levy_K") {
  SUBCASE("identity integrates the whole measure") {
    for (const auto& m : {NoiseModel::laplace(), NoiseModel::centered_gamma(2.0),
                          NoiseModel::sech()}) {
      auto id = [](double u) { return u; };
      auto one = [](double) { return 1.0; };
      const auto r = levy_K(m, id, 0.7, {}, nullptr, QuadOptions{1e-11, 1e-11, 4000});
      CHECK(r.value == doctest::Approx(m.variance()).epsilon(1e-9));
      CHECK(levy_K(m, one, -1.2).value == doctest::Approx(0.0));
    }
  }
  SUBCASE("laplace hinge matches the closed form") {
    auto g0p = [](double u) { return std::max(u, 0.0); };
    for (double x = -9.5; x <= 9.5; x += 0.61) {
      const auto r = levy_K(NoiseModel::laplace(), g0p, x, kHingeKink, nullptr,
                            QuadOptions{1e-10, 1e-10, 4000});
      CHECK(r.value == doctest::Approx(laplace_h_ref(x)).epsilon(1e-8));
      CHECK(r.abs_error < 1e-8);
    }
  }
  SUBCASE("non-convergence carries the achieved tolerance") {
    auto g0p = [](double u) { return std::max(u, 0.0); };
    CHECK_THROWS_AS(
        (void)levy_K(NoiseModel::sech(), g0p, 0.3, kHingeKink, nullptr,
                     QuadOptions{1e-16, 1e-16, 4}),
        quadrature_error);
  }
}

TEST_CASE("compound_poisson_K") {
  const double rate = 1.7;
  const auto jump = gaussian_jumps(0.4, 0.9);

  SUBCASE("constant g picks out the mean jump") {
    auto one = [](double) { return 1.0; };
    const double got = compound_poisson_K(rate, jump.pdf, jump.lo, jump.hi, one,
                                          0.3, {}, QuadOptions{1e-11, 1e-11, 4000});
    CHECK(got == doctest::Approx(rate * jump.mean).epsilon(1e-9));
  }
  SUBCASE("symmetric jumps, constant g: odd integrand vanishes") {
    const auto sym = gaussian_jumps(0.0, 1.0);
    auto one = [](double) { return 1.0; };
    const double got = compound_poisson_K(2.0, sym.pdf, sym.lo, sym.hi, one, 0.0);
    CHECK(got == doctest::Approx(0.0));
  }
  SUBCASE("agrees with levy_K on the equivalent law") {
    const auto model = NoiseModel::compound_poisson(rate, jump);
    const auto g = residual(soft_expr(1.0));
    auto gfn = [&g](double u) { return g(u); };
    const auto kinks = g.knots();
    for (double x : {-2.0, -0.3, 0.6, 1.9}) {
      const double a = compound_poisson_K(rate, jump.pdf, jump.lo, jump.hi, gfn,
                                          x, kinks, QuadOptions{1e-11, 1e-11, 4000});
      const double b =
          levy_K(model, gfn, x, kinks, nullptr, QuadOptions{1e-11, 1e-11, 4000})
              .value;
      CHECK(a == doctest::Approx(b).epsilon(1e-8));
    }
  }
}

TEST_CASE("spectral_K") {
  auto bump = [](double x) {
    const double t = x / 2.0;
    return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  };
  SUBCASE("zero input gives zero output") {
    auto zero = [](double) { return 0.0; };
    const auto r = spectral_K(NoiseModel::laplace(), zero, {16.0, 1 << 10});
    for (double v : r.values) CHECK(v == 0.0);
  }
  SUBCASE("matches levy_K for laplace noise on the central half") {
    const auto r = spectral_K(NoiseModel::laplace(), bump, {16.0, 1 << 12});
    double max_abs = 0.0, max_err = 0.0;
    for (int j = 0; j < (1 << 12); j += 16) {
      const double x = r.x[j];
      if (std::abs(x) > 8.0) continue;
      const double q = levy_K(NoiseModel::laplace(), bump, x, {}, nullptr,
                              QuadOptions{1e-10, 1e-10, 4000})
                           .value;
      max_abs = std::max(max_abs, std::abs(q));
      max_err = std::max(max_err, std::abs(q - r.values[j]));
    }
    CHECK(max_err / max_abs < 1e-3);
  }
  SUBCASE("gaussian case reduces to the scaled derivative") {
    const auto r = spectral_K(NoiseModel::normal(1.0), bump, {16.0, 1 << 12});
    const double dx = 1e-5;
    for (int j = 0; j < (1 << 12); j += 64) {
      const double x = r.x[j];
      if (std::abs(x) > 6.0) continue;
      const double want = (bump(x + dx) - bump(x - dx)) / (2.0 * dx);
      CHECK(r.values[j] == doctest::Approx(want).epsilon(1e-4));
    }
  }
  SUBCASE("boundary contamination is rejected") {
    auto wide = [](double x) { return std::exp(-0.01 * x * x); };
    CHECK_THROWS_AS((void)spectral_K(NoiseModel::laplace(), wide, {4.0, 1 << 10}),
                    std::invalid_argument);
  }
}

TEST_CASE("clt_K") {
  const auto lap = NoiseModel::laplace();
  auto sine = [](double u) { return std::sin(u); };
  auto cosine = [](double u) { return std::cos(u); };
  const std::function<double(double)> gprime = cosine;

  SUBCASE("n = 1 recovers levy_K") {
    for (double x : {-1.0, 0.0, 2.2}) {
      const double a = clt_K(lap, 1, sine, x, &gprime).value;
      const double b = levy_K(lap, sine, x, {}, &gprime).value;
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
  SUBCASE("identity g gives the variance for every n") {
    auto id = [](double u) { return u; };
    for (int n : {1, 4, 64})
      CHECK(clt_K(lap, n, id, 0.4).value ==
            doctest::Approx(lap.variance()).epsilon(1e-9));
  }
  SUBCASE("error against the gaussian limit decreases in n") {
    double prev = 1e300;
    for (int n : {1, 4, 16, 64, 256}) {
      const double err =
          std::abs(clt_K(lap, n, sine, 0.0, &gprime).value - 1.0);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 0.01);
  }
}

TEST_CASE("operator transformation rules") {
  const std::vector<double> xs = {-2.63, -0.87, 0.14, 1.41, 3.02};
  const auto g = residual(soft_expr(1.5));
  auto gfn = [&g](double u) { return g(u); };
  const auto kinks = g.knots();

  SUBCASE("degenerate parameters give zero deviation") {
    const auto rep0 = check_transform_rules(NoiseModel::laplace(), NoiseModel::sech(),
                                     gfn, kinks, 0.0, 1.0, xs,
                                     QuadOptions{1e-11, 1e-11, 4000});
    CHECK(rep0.translation_dev < 1e-10);
    CHECK(rep0.scaling_dev < 1e-10);
  }
  SUBCASE("laplace pair") {
    const auto rep = check_transform_rules(NoiseModel::laplace(), NoiseModel::laplace(),
                                    gfn, kinks, 0.8, 1.6, xs,
                                    QuadOptions{1e-11, 1e-11, 4000});
    CHECK(rep.max_deviation() < 1e-6);
  }
}

TEST_CASE("defining identity by quadrature") {
  for (const auto& m : {NoiseModel::laplace(), NoiseModel::centered_gamma(2.0)}) {
    SteinOperator K(m);
    for (const auto& g : {residual(soft_expr(2.0)), residual(mid_expr(2.0))}) {
      for (double theta : {0.0, 0.7}) {
        const auto chk =
            stein_identity_quadrature(K, g, theta, QuadOptions{1e-10, 1e-10, 4000});
        CHECK(chk.gap() < 1e-7);
      }
    }
  }
}

TEST_CASE("defining identity for a triple with atoms (Monte Carlo)") {
  LevyTriple t;
  t.gaussian_var = 0.3;
  t.jumps = MeasureSpec(
      {JumpComponent([](double) { return 0.4; }, 0.5, 1.5, 0.4)},
      {{-1.0, 0.3}});
  const auto m = NoiseModel::generic(std::move(t));
  SteinOperator K(m);
  const auto g = residual(soft_expr(1.0));
  const auto chk = mc_stein_check(K, g, 0.7, 400000, 17);
  CHECK(std::abs(chk.lhs - chk.rhs) < 5.0 * chk.se);
}
