// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace sureid {

/// Building blocks for piecewise-linear estimators. Hinges follow the
/// conventions hinge_plus(k)(x) = max(x-k, 0), hinge_minus(k)(x) = min(x-k, 0),
/// so identity(x) = hinge_plus(0)(x) + hinge_minus(0)(x).
struct BuildingBlock {
  enum class Kind { identity, constant, hinge_plus, hinge_minus };

  Kind kind = Kind::identity;
  double value = 0.0;  // constant value, or hinge knot

  static BuildingBlock identity() { return {Kind::identity, 0.0}; }
  static BuildingBlock constant(double c) { return {Kind::constant, c}; }
  static BuildingBlock hinge_plus(double knot) {
    return {Kind::hinge_plus, knot};
  }
  static BuildingBlock hinge_minus(double knot) {
    return {Kind::hinge_minus, knot};
  }

  double operator()(double x) const;
  /// One-sided (right) derivative; the convention used for the Gaussian
  /// part of the Stein operator at hinge knots.
  double right_derivative(double x) const;
};

/// A linear combination of building blocks; evaluates to the weighted sum.
struct EstimatorExpr {
  std::vector<std::pair<double, BuildingBlock>> terms;

  double operator()(double x) const;
  /// Right derivative of the combination.
  double right_derivative(double x) const;
  /// Hinge knots, for quadrature splitting.
  std::vector<double> knots() const;
};

EstimatorExpr identity_expr();

/// Soft thresholding sign(x) * max(|x| - lambda, 0) as the five-term hinge
/// decomposition.
EstimatorExpr soft_expr(double lambda);

/// Mid thresholding: x for |x| >= lambda, 2 (|x| - lambda/2)_+ sign(x)
/// inside; the eight-term hinge decomposition.
EstimatorExpr mid_expr(double lambda);

/// expr minus one unit of identity (the g of d(x) = x + g(x)).
EstimatorExpr residual(const EstimatorExpr& expr);

struct SmoothExprResult {
  EstimatorExpr expr;
  double max_error;  // sup deviation from the target on a check grid
};

/// Hinge expansion of a smooth g on [0, support_hi] with g(0) = 0:
/// g'(0+) x_+ plus quadrature weights on hinge_plus nodes against g''.
/// Throws quadrature_error when g'' is not integrable over the support.
SmoothExprResult smooth_expr(double g_prime_at_0,
                             const std::function<double(double)>& g_second,
                             double support_hi, int nodes = 256);

/// Parses {"type": "soft"|"mid", "lambda": x} or
/// {"terms": [[coeff, {"kind": ..., "knot"/"value": ...}], ...]}.
EstimatorExpr estimator_from_json(const std::string& text);

}  // namespace sureid
