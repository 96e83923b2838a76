// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sureid/estimator.hpp"
#include "sureid/noise_model.hpp"
#include "sureid/quadrature.hpp"

namespace sureid {

struct KernelOptions {
  double grid_step_sigma = 1e-3;  // memo grid step, in units of the sd
  double lambda_max_sigma = 8.0;  // largest hinge translate the grid covers
  double pad_sigma = 12.0;        // grid half-range = (pad + lambda_max) * sd
  QuadOptions quad;
};

/// The hinge kernel h = K(x -> max(x,0)) of a centered law. Monotone from 0
/// to the variance; closed form for normal, Laplace and gamma noise,
/// otherwise memoized on a uniform grid with cubic interpolation and
/// clamped to its limits outside the grid.
class HingeKernel {
 public:
  double operator()(double x) const;
  double variance() const { return variance_; }
  double gaussian_var() const { return gaussian_var_; }
  bool closed_form() const { return kind_ != Kind::grid; }

  static HingeKernel normal_form(double variance);
  static HingeKernel laplace_form(double s);
  static HingeKernel gamma_form(double t, double scale_c = 1.0);
  static HingeKernel tabulated(const LevyTriple& triple,
                               const KernelOptions& opts = {});

 private:
  enum class Kind { normal, laplace, gamma, grid };
  HingeKernel() = default;

  double eval_grid(double x) const;

  Kind kind_ = Kind::normal;
  double variance_ = 0.0;
  double gaussian_var_ = 0.0;
  double param_ = 0.0;   // s for laplace, t for gamma
  double scale_c_ = 1.0; // gamma only: kernel of the law of c*X

  // grid storage (jump part only; the Gaussian step and atoms are applied
  // analytically at evaluation time)
  double grid_lo_ = 0.0, grid_step_ = 1.0;
  int zero_index_ = 0;
  std::vector<double> values_;
  std::vector<JumpAtom> atoms_;
};

/// Builds the hinge kernel of a centered infinitely divisible model.
/// Throws for uniform noise and for models with nonzero mean.
HingeKernel hinge_kernel(const NoiseModel& model, const KernelOptions& opts = {});

/// The generalized Stein operator of a law, specialized to piecewise-linear
/// estimator expressions: every hinge reduces to a translate of the hinge
/// kernel. Construction memoizes the kernel once; evaluation is read-only
/// and safe to call concurrently.
class SteinOperator {
 public:
  explicit SteinOperator(const NoiseModel& model, const KernelOptions& opts = {});

  /// K(expr)(x).
  double apply(const EstimatorExpr& expr, double x) const;
  /// h(x) of the centered part.
  double hinge(double x) const { return h_(x); }

  const NoiseModel& model() const { return model_; }
  double variance() const { return variance_; }
  double drift() const { return drift_; }

 private:
  NoiseModel model_;
  HingeKernel h_;
  double drift_ = 0.0;
  double variance_ = 0.0;
};

/// One-off convenience wrapper; builds the kernel, applies, discards.
double apply_K(const NoiseModel& model, const EstimatorExpr& expr, double x,
               const KernelOptions& opts = {});

struct KResult {
  double value = 0.0;
  double abs_error = 0.0;
};

/// K(g)(x) straight from the Lévy triple: drift * g(x) plus the Gaussian
/// derivative term plus adaptive quadrature of the difference quotient
/// against the jump measure. `g_kinks` lists kink locations of g (in g's
/// argument) used to split the quadrature; `g_prime` overrides the central
/// finite difference used for the Gaussian term and near-zero jumps.
KResult levy_K(const NoiseModel& model, const std::function<double(double)>& g,
               double x, std::span<const double> g_kinks = {},
               const std::function<double(double)>* g_prime = nullptr,
               const QuadOptions& opts = {});

/// Convolution form for compound Poisson noise:
/// rate * integral f(u) u g(x+u) du over the jump support.
double compound_poisson_K(double rate,
                          const std::function<double(double)>& jump_pdf,
                          double lo, double hi,
                          const std::function<double(double)>& g, double x,
                          std::span<const double> g_kinks = {},
                          const QuadOptions& opts = {});

struct SpectralGrid {
  double half_width = 16.0;
  int n = 1 << 14;  // power of two
};

struct SpectralResult {
  std::vector<double> x;
  std::vector<double> values;
};

/// K(g) through the Fourier multiplier: FFT of the sampled g, pointwise
/// multiplication by the multiplier, inverse FFT. g must be supported well
/// inside the grid; throws if the boundary region is contaminated.
SpectralResult spectral_K(const NoiseModel& model,
                          const std::function<double(double)>& g,
                          const SpectralGrid& grid = {});

/// The operator of the law of (X_1 + ... + X_n)/sqrt(n): the difference
/// quotient at lag y/sqrt(n) against the base jump measure. n = 1 recovers
/// levy_K; as n grows the value approaches variance * g'(x).
KResult clt_K(const NoiseModel& model, int n,
              const std::function<double(double)>& g, double x,
              const std::function<double(double)>* g_prime = nullptr,
              const QuadOptions& opts = {});

/// Numerical verification of the operator's transformation rules:
/// translation, drift, convolution and scaling. Deviations are sup-norms
/// over the evaluation grid xs.
struct TransformRulesReport {
  double translation_dev = 0.0;
  double drift_dev = 0.0;
  double convolution_dev = 0.0;
  double scaling_dev = 0.0;
  double max_deviation() const;
};

TransformRulesReport check_transform_rules(const NoiseModel& f1, const NoiseModel& f2,
                              const std::function<double(double)>& g,
                              std::span<const double> g_kinks, double b,
                              double c, std::span<const double> xs,
                              const QuadOptions& opts = {});

struct IdentityCheck {
  double lhs = 0.0;  // integral of K(g)(x + theta) f(x) dx
  double rhs = 0.0;  // integral of x g(x + theta) f(x) dx
  double gap() const;
};

/// Quadrature check of the defining identity for a density model.
IdentityCheck stein_identity_quadrature(const SteinOperator& K,
                                        const EstimatorExpr& g, double theta,
                                        const QuadOptions& opts = {});

}  // namespace sureid
