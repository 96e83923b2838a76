// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include "sureid/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sureid/errors.hpp"
#include "sureid/quadrature.hpp"

namespace sureid {

double BuildingBlock::operator()(double x) const {
  switch (kind) {
    case Kind::identity: return x;
    case Kind::constant: return value;
    case Kind::hinge_plus: return std::max(x - value, 0.0);
    case Kind::hinge_minus: return std::min(x - value, 0.0);
  }
  return 0.0;
}

double BuildingBlock::right_derivative(double x) const {
  switch (kind) {
    case Kind::identity: return 1.0;
    case Kind::constant: return 0.0;
    case Kind::hinge_plus: return x >= value ? 1.0 : 0.0;
    case Kind::hinge_minus: return x < value ? 1.0 : 0.0;
  }
  return 0.0;
}

double EstimatorExpr::operator()(double x) const {
  double s = 0.0;
  for (const auto& [coeff, block] : terms) s += coeff * block(x);
  return s;
}

double EstimatorExpr::right_derivative(double x) const {
  double s = 0.0;
  for (const auto& [coeff, block] : terms) s += coeff * block.right_derivative(x);
  return s;
}

std::vector<double> EstimatorExpr::knots() const {
  std::vector<double> k;
  for (const auto& [coeff, block] : terms) {
    (void)coeff;
    if (block.kind == BuildingBlock::Kind::hinge_plus ||
        block.kind == BuildingBlock::Kind::hinge_minus)
      k.push_back(block.value);
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

EstimatorExpr identity_expr() {
  return {{{1.0, BuildingBlock::identity()}}};
}

EstimatorExpr soft_expr(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("soft_expr: lambda <= 0");
  EstimatorExpr e;
  e.terms = {
      {1.0, BuildingBlock::identity()},
      {-1.0, BuildingBlock::hinge_plus(0.0)},
      {1.0, BuildingBlock::hinge_plus(lambda)},
      {-1.0, BuildingBlock::hinge_minus(0.0)},
      {1.0, BuildingBlock::hinge_minus(-lambda)},
  };
  return e;
}

EstimatorExpr mid_expr(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("mid_expr: lambda <= 0");
  EstimatorExpr e;
  e.terms = {
      {1.0, BuildingBlock::identity()},
      {-1.0, BuildingBlock::hinge_plus(0.0)},
      {2.0, BuildingBlock::hinge_plus(0.5 * lambda)},
      {-1.0, BuildingBlock::hinge_plus(lambda)},
      {-1.0, BuildingBlock::hinge_minus(0.0)},
      {2.0, BuildingBlock::hinge_minus(-0.5 * lambda)},
      {-1.0, BuildingBlock::hinge_minus(-lambda)},
  };
  return e;
}

EstimatorExpr residual(const EstimatorExpr& expr) {
  EstimatorExpr out;
  double id_coeff = -1.0;
  for (const auto& [coeff, block] : expr.terms) {
    if (block.kind == BuildingBlock::Kind::identity)
      id_coeff += coeff;
    else
      out.terms.push_back({coeff, block});
  }
  if (id_coeff != 0.0)
    out.terms.insert(out.terms.begin(), {id_coeff, BuildingBlock::identity()});
  return out;
}

SmoothExprResult smooth_expr(double g_prime_at_0,
                             const std::function<double(double)>& g_second,
                             double support_hi, int nodes) {
  if (!(support_hi > 0.0))
    throw std::invalid_argument("smooth_expr: support must be positive");
  if (nodes < 1) throw std::invalid_argument("smooth_expr: nodes < 1");

  // g'' must be integrable over the truncated support
  QuadResult mass = integrate_gk([&](double y) { return std::abs(g_second(y)); },
                                 0.0, support_hi, QuadOptions{1e-8, 1e-8, 4000});
  if (!mass.converged || !std::isfinite(mass.value))
    throw quadrature_error("smooth_expr: g'' is not integrable over the support",
                           mass.error);

  const int panels = (nodes + 15) / 16;
  EstimatorExpr e;
  if (g_prime_at_0 != 0.0)
    e.terms.push_back({g_prime_at_0, BuildingBlock::hinge_plus(0.0)});
  const double w = support_hi / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = p * w + 0.5 * w;
    const double half = 0.5 * w;
    for (int i = 0; i < 8; ++i) {
      for (double sgn : {+1.0, -1.0}) {
        const double y = mid + sgn * half * detail::kGL16_x[i];
        const double weight = half * detail::kGL16_w[i] * g_second(y);
        if (weight != 0.0)
          e.terms.push_back({weight, BuildingBlock::hinge_plus(y)});
      }
    }
  }

  // reconstruction error on a check grid against the defining integral form
  auto target = [&](double x) {
    double v = g_prime_at_0 * std::max(x, 0.0);
    if (x > 0.0) {
      v += integrate_gk([&](double y) { return (x - y) * g_second(y); }, 0.0,
                        std::min(x, support_hi), QuadOptions{1e-11, 1e-11, 4000})
               .value;
    }
    return v;
  };
  double max_err = 0.0;
  const int check_points = 97;
  for (int i = 0; i <= check_points; ++i) {
    const double x = support_hi * i / check_points;
    max_err = std::max(max_err, std::abs(e(x) - target(x)));
  }
  return {std::move(e), max_err};
}

}  // namespace sureid
