// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>

#include "sureid/measure.hpp"
#include "sureid/rng.hpp"

namespace sureid {

/// Canonical representation of an infinitely divisible law with finite
/// variance: log cf(t) = i*b*t + integral (e^{ixt} - 1 - ixt)/x^2 M(dx),
/// where M is finite. The atom M({0}) is stored as gaussian_var and the
/// rest of M as `jumps`. The drift b equals the mean; gaussian_var plus
/// the jump mass equals the variance.
struct LevyTriple {
  double drift = 0.0;
  double gaussian_var = 0.0;
  MeasureSpec jumps;

  double variance() const { return gaussian_var + jumps.total_mass(); }
};

enum class Family {
  normal,
  laplace,
  centered_gamma,
  sech,
  compound_poisson,
  uniform,
  generic_id,
};

/// Jump distribution of a compound Poisson law.
struct JumpSpec {
  std::function<double(double)> pdf;
  double lo = 0.0, hi = 0.0;  // truncated support
  double mean = 0.0;
  double second_moment = 0.0;
  std::function<double(double)> quantile;          // optional inverse CDF
  std::function<double(CounterRng&)> sampler;      // optional direct sampler
};

/// A noise law: one of the named families or a generic Lévy triple, with an
/// affine transform (scale, shift) layered on top. Immutable value type.
class NoiseModel {
 public:
  static NoiseModel normal(double variance);
  /// Unit-variance Laplace scaled by s (variance s^2).
  static NoiseModel laplace(double s = 1.0);
  /// Gamma(shape t, unit rate) centered at zero (mean 0, variance t).
  static NoiseModel centered_gamma(double t);
  /// Hyperbolic secant law with density sech(pi x / 2) / 2 (variance 1).
  static NoiseModel sech();
  static NoiseModel compound_poisson(double rate, JumpSpec jump);
  /// Uniform on (-halfwidth, halfwidth); not infinitely divisible.
  static NoiseModel uniform(double halfwidth = 1.0);
  static NoiseModel generic(LevyTriple triple);

  Family family() const { return family_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double sd() const;
  bool infinitely_divisible() const { return family_ != Family::uniform; }

  double scale_factor() const { return scale_; }
  double offset() const { return shift_; }

  // base-family parameters (meaningful per family; see factory functions)
  double normal_variance() const { return param_; }
  double laplace_s() const { return param_; }
  double gamma_t() const { return param_; }
  double uniform_halfwidth() const { return param_; }
  double cp_rate() const { return param_; }
  const JumpSpec& cp_jump() const { return jump_; }
  const LevyTriple& generic_triple() const { return triple_; }

  std::string describe() const;

 private:
  NoiseModel() = default;
  friend NoiseModel scale(const NoiseModel&, double);
  friend NoiseModel shift(const NoiseModel&, double);

  Family family_ = Family::normal;
  double param_ = 1.0;
  JumpSpec jump_;      // compound_poisson only
  LevyTriple triple_;  // generic_id only
  double scale_ = 1.0;
  double shift_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 1.0;
};

/// Canonical Lévy triple of the law. Throws unsupported_model_error for
/// uniform noise, which is not infinitely divisible.
LevyTriple levy_view(const NoiseModel& model);

/// psi(w) = cf'(-w) / (i * cf(-w)); the Fourier multiplier taking the
/// transform of g to the transform of K(g). psi(0) equals the mean.
std::complex<double> char_multiplier(const NoiseModel& model, double w);

/// Characteristic function (available for every supported law).
std::complex<double> char_function(const NoiseModel& model, double w);

/// Law of the sum of independent draws from a and b.
NoiseModel convolve(const NoiseModel& a, const NoiseModel& b);

/// Law of c * X, c != 0.
NoiseModel scale(const NoiseModel& model, double c);

/// Law of X + b.
NoiseModel shift(const NoiseModel& model, double b);

/// Law of (X_1 + ... + X_n) / sqrt(n) for iid mean-zero X_i.
NoiseModel clt_normalize(const NoiseModel& model, int n);

struct DensityView {
  std::function<double(double)> pdf;
  double lo, hi;  // truncated support
};

/// Closed-form density when the family has one (normal, laplace, gamma,
/// sech, uniform); nullopt for compound Poisson and generic laws.
std::optional<DensityView> density(const NoiseModel& model);

/// Parses {"family": ..., parameters..., "scale": c, "shift": b}.
/// Unknown fields are rejected.
NoiseModel model_from_json(const std::string& text);

/// Named jump distributions for compound Poisson models:
/// gaussian(mean, sd), uniform(lo, hi), exponential(rate).
JumpSpec gaussian_jumps(double mean, double sd);
JumpSpec uniform_jumps(double lo, double hi);
JumpSpec exponential_jumps(double rate);

}  // namespace sureid
