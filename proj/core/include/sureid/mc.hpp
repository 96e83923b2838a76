// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sureid/estimator.hpp"
#include "sureid/noise_model.hpp"
#include "sureid/rng.hpp"
#include "sureid/stein_kernel.hpp"

namespace sureid {

struct SampleBatch {
  std::string model;
  std::uint64_t seed = 0;
  std::vector<double> values;
  /// For generic laws sampled through the compound-Poisson approximation:
  /// the variance mass of the small jumps folded into the Gaussian part,
  /// relative to the total variance. Zero for exact samplers.
  double approx_tol = 0.0;
};

/// iid draws from the model. Identical (model, n, seed) give bit-identical
/// batches on every run and thread count.
SampleBatch sample(const NoiseModel& model, std::size_t n, std::uint64_t seed);

/// Reusable sampler; construction precomputes inverse-CDF tables where
/// needed, draws are then cheap and deterministic per stream.
class ModelSampler {
 public:
  explicit ModelSampler(const NoiseModel& model);
  double draw(CounterRng& rng) const;
  double approx_tol() const { return approx_tol_; }

 private:
  std::function<double(CounterRng&)> draw_;
  double approx_tol_ = 0.0;
};

struct SteinCheck {
  double lhs = 0.0;  // mean of K(g)(X + theta)
  double rhs = 0.0;  // mean of X * g(X + theta)
  double se = 0.0;   // standard error of the paired difference
};

/// Monte Carlo check of the defining identity E K(g)(X+theta) =
/// E X g(X+theta). The caller asserts |lhs - rhs| <= k * se.
SteinCheck mc_stein_check(const SteinOperator& K, const EstimatorExpr& g,
                          double theta, std::size_t n, std::uint64_t seed,
                          int threads = 1);

/// Same check for a caller-supplied pair (g, K(g)).
SteinCheck mc_stein_check(const NoiseModel& model,
                          const std::function<double(double)>& g,
                          const std::function<double(double)>& Kg, double theta,
                          std::size_t n, std::uint64_t seed, int threads = 1);

struct McRisk {
  double risk = 0.0;
  double se = 0.0;
};

/// Monte Carlo estimate of E (d(X + theta) - theta)^2.
McRisk mc_risk(const NoiseModel& model, const EstimatorExpr& d, double theta,
               std::size_t n, std::uint64_t seed, int threads = 1);

}  // namespace sureid
