// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "sureid/stein_kernel.hpp"

namespace sureid {

/// Per-observation unbiased risk estimate with its additive pieces:
/// value = variance_term + g_squared + cross_term. `model` is filled from
/// the noise model; `estimator` is a caller-supplied label.
struct RiskEstimate {
  double value = 0.0;
  double variance_term = 0.0;
  double g_squared = 0.0;
  double cross_term = 0.0;
  double x = 0.0;
  std::string model;
  std::string estimator;
};

/// Unbiased estimate of the squared-error risk of the estimator at the
/// observation x: variance + g(x)^2 + 2 K(g)(x) with g the residual of the
/// estimator. Requires a centered model.
RiskEstimate unbiased_risk(const SteinOperator& K, const EstimatorExpr& estimator,
                           double x);
RiskEstimate unbiased_risk(const NoiseModel& model, const EstimatorExpr& estimator,
                           double x, const KernelOptions& opts = {});

/// Hinge kernel for uniform noise on (-1, 1): zero on the negative axis,
/// the 2-periodic extension of -x(x-2)/2 on the positive axis. One valid
/// choice among many; fixed as the canonical representative.
double uniform_h(double x);

/// r(theta) = (1/2) * integral over (-1,1) of x (x + theta)_+ dx; the
/// exact piecewise cubic.
double uniform_r(double theta);

/// Soft-threshold unbiased risk under uniform noise on (-a, a), assembled
/// from uniform_h with the scaling rule and the complement kernel
/// variance - h.
RiskEstimate unbiased_risk_uniform_soft(double halfwidth, double lambda,
                                        double x);

struct ExpectedRisk {
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate, or Monte Carlo SE
  bool monte_carlo = false;
};

/// E (d(X + theta) - theta)^2, by adaptive quadrature when the model has a
/// closed-form density, otherwise by Monte Carlo with the reported SE.
ExpectedRisk expected_risk(const NoiseModel& model, const EstimatorExpr& d,
                           double theta, const QuadOptions& opts = {},
                           std::size_t mc_samples = 400000,
                           std::uint64_t mc_seed = 7);

/// Residual of one coordinate of a multivariate estimator; receives the
/// full observation vector.
using CoordResidual = std::function<double(std::span<const double>)>;

/// Coordinatewise unbiased risk for independent coordinates:
/// sum_i [var_i + g_i(x)^2 + 2 K_i(g_i(., x_-i))(x_i)].
double multivariate_risk(std::span<const NoiseModel> models,
                         std::span<const CoordResidual> residuals,
                         std::span<const double> x,
                         const QuadOptions& opts = {});

inline constexpr const char* kRiskCurveCsvHeader =
    "x,risk,variance_term,g_squared,cross_term";

/// One CSV row in the risk-curve format, 17 significant digits.
void write_risk_curve_row(std::ostream& os, const RiskEstimate& r);

}  // namespace sureid
