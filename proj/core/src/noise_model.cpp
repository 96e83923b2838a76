// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include "sureid/noise_model.hpp"

#include <cmath>
#include <stdexcept>

#include "sureid/errors.hpp"

namespace sureid {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// Truncation radii chosen so the discarded tail mass is far below 1e-10
// of the total (exponential-type tails in every family).
constexpr double kLaplaceSupport = 28.0;  // per unit of s
constexpr double kGammaSupportHi = 50.0;
constexpr double kSechSupport = 30.0;

double laplace_m_density(double y, double s) {
  // canonical measure density of the Laplace(s) law: |y| exp(-sqrt(2)|y|/s)
  return std::abs(y) * std::exp(-kSqrt2 * std::abs(y) / s);
}

double sech_m_density(double y) {
  // y / (e^{pi y/2} - e^{-pi y/2}), continuously extended by 1/pi at 0
  const double a = 0.5 * M_PI * y;
  if (std::abs(a) < 1e-8) return 1.0 / M_PI;
  return y / (2.0 * std::sinh(a));
}

}  // namespace

NoiseModel NoiseModel::normal(double variance) {
  if (!(variance > 0.0))
    throw std::invalid_argument("normal: variance must be positive");
  NoiseModel m;
  m.family_ = Family::normal;
  m.param_ = variance;
  m.mean_ = 0.0;
  m.variance_ = variance;
  return m;
}

NoiseModel NoiseModel::laplace(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("laplace: s must be positive");
  NoiseModel m;
  m.family_ = Family::laplace;
  m.param_ = s;
  m.mean_ = 0.0;
  m.variance_ = s * s;
  return m;
}

NoiseModel NoiseModel::centered_gamma(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
  NoiseModel m;
  m.family_ = Family::centered_gamma;
  m.param_ = t;
  m.mean_ = 0.0;
  m.variance_ = t;
  return m;
}

NoiseModel NoiseModel::sech() {
  NoiseModel m;
  m.family_ = Family::sech;
  m.mean_ = 0.0;
  m.variance_ = 1.0;
  return m;
}

NoiseModel NoiseModel::compound_poisson(double rate, JumpSpec jump) {
  if (!(rate > 0.0))
    throw std::invalid_argument("compound poisson: rate must be positive");
  if (!jump.pdf || !(jump.lo < jump.hi))
    throw std::invalid_argument("compound poisson: bad jump distribution");
  NoiseModel m;
  m.family_ = Family::compound_poisson;
  m.param_ = rate;
  m.jump_ = std::move(jump);
  m.mean_ = rate * m.jump_.mean;
  m.variance_ = rate * m.jump_.second_moment;
  if (!(m.variance_ > 0.0))
    throw std::invalid_argument("compound poisson: zero-variance jumps");
  return m;
}

NoiseModel NoiseModel::uniform(double halfwidth) {
  if (!(halfwidth > 0.0))
    throw std::invalid_argument("uniform: halfwidth must be positive");
  NoiseModel m;
  m.family_ = Family::uniform;
  m.param_ = halfwidth;
  m.mean_ = 0.0;
  m.variance_ = halfwidth * halfwidth / 3.0;
  return m;
}

NoiseModel NoiseModel::generic(LevyTriple triple) {
  NoiseModel m;
  m.family_ = Family::generic_id;
  m.mean_ = triple.drift;
  m.variance_ = triple.variance();
  m.triple_ = std::move(triple);
  if (!(m.variance_ > 0.0))
    throw std::invalid_argument("generic law: variance must be positive");
  return m;
}

double NoiseModel::sd() const { return std::sqrt(variance_); }

std::string NoiseModel::describe() const {
  std::string base;
  switch (family_) {
    case Family::normal: base = "normal(var=" + std::to_string(param_) + ")"; break;
    case Family::laplace: base = "laplace(s=" + std::to_string(param_) + ")"; break;
    case Family::centered_gamma: base = "gamma(t=" + std::to_string(param_) + ")"; break;
    case Family::sech: base = "sech"; break;
    case Family::compound_poisson:
      base = "compound_poisson(rate=" + std::to_string(param_) + ")";
      break;
    case Family::uniform: base = "uniform(a=" + std::to_string(param_) + ")"; break;
    case Family::generic_id: base = "generic_id"; break;
  }
  if (scale_ != 1.0) base += "*" + std::to_string(scale_);
  if (shift_ != 0.0) base += "+" + std::to_string(shift_);
  return base;
}

LevyTriple levy_view(const NoiseModel& model) {
  LevyTriple base;
  switch (model.family()) {
    case Family::normal:
      base.gaussian_var = model.normal_variance();
      break;
    case Family::laplace: {
      const double s = model.laplace_s();
      base.jumps = MeasureSpec({JumpComponent(
          [s](double y) { return laplace_m_density(y, s); },
          -kLaplaceSupport * s, kLaplaceSupport * s)});
      break;
    }
    case Family::centered_gamma: {
      const double t = model.gamma_t();
      base.jumps = MeasureSpec({JumpComponent(
          [t](double x) { return x > 0.0 ? t * x * std::exp(-x) : 0.0; }, 0.0,
          kGammaSupportHi)});
      break;
    }
    case Family::sech:
      base.jumps = MeasureSpec({JumpComponent(
          [](double y) { return sech_m_density(y); }, -kSechSupport,
          kSechSupport)});
      break;
    case Family::compound_poisson: {
      const double rate = model.cp_rate();
      const JumpSpec& j = model.cp_jump();
      auto pdf = j.pdf;
      base.drift = rate * j.mean;
      base.jumps = MeasureSpec({JumpComponent(
          [rate, pdf](double u) { return rate * u * u * pdf(u); }, j.lo, j.hi)});
      break;
    }
    case Family::uniform:
      throw unsupported_model_error(
          "uniform noise is not infinitely divisible and has no Lévy triple; "
          "use the dedicated uniform risk path");
    case Family::generic_id:
      base = model.generic_triple();
      break;
  }

  const double c = model.scale_factor();
  const double b = model.offset();
  LevyTriple out;
  out.drift = c * base.drift + b;
  out.gaussian_var = c * c * base.gaussian_var;
  out.jumps = (c == 1.0) ? base.jumps : base.jumps.scaled(c);
  return out;
}

std::complex<double> char_multiplier(const NoiseModel& model, double w) {
  using namespace std::complex_literals;
  const double c = model.scale_factor();
  const double b = model.offset();
  const double wc = c * w;

  std::complex<double> base;
  switch (model.family()) {
    case Family::normal:
      base = -1i * model.normal_variance() * wc;
      break;
    case Family::laplace: {
      const double s = model.laplace_s();
      base = -2.0i * s * s * wc / (2.0 + s * s * wc * wc);
      break;
    }
    case Family::centered_gamma: {
      const double t = model.gamma_t();
      base = -1i * t * wc / (1.0 + 1i * wc);
      break;
    }
    case Family::sech:
      base = -1i * std::tanh(wc);
      break;
    case Family::compound_poisson: {
      const double rate = model.cp_rate();
      const JumpSpec& j = model.cp_jump();
      auto pdf = j.pdf;
      QuadOptions opts{1e-12, 1e-12, 8000};
      const double re = integrate_gk(
          [&](double u) { return u * pdf(u) * std::cos(u * wc); }, j.lo, j.hi,
          opts).value;
      const double im = integrate_gk(
          [&](double u) { return -u * pdf(u) * std::sin(u * wc); }, j.lo, j.hi,
          opts).value;
      base = rate * std::complex<double>(re, im);
      break;
    }
    case Family::uniform:
      throw unsupported_model_error(
          "uniform noise: the characteristic function has zeros, the Fourier "
          "multiplier is undefined");
    case Family::generic_id: {
      const LevyTriple& t = model.generic_triple();
      std::complex<double> jump = t.jumps.integrate_complex(
          [wc](double x) -> std::complex<double> {
            if (std::abs(x * wc) < 1e-10) {
              return {0.0, -wc};  // limit of (e^{-ixw} - 1)/x as x -> 0
            }
            return (std::exp(std::complex<double>(0.0, -x * wc)) - 1.0) / x;
          },
          QuadOptions{1e-12, 1e-12, 8000});
      base = t.drift - 1i * t.gaussian_var * wc + jump;
      break;
    }
  }
  return b + c * base;
}

std::complex<double> char_function(const NoiseModel& model, double w) {
  using namespace std::complex_literals;
  const double c = model.scale_factor();
  const double b = model.offset();
  const double wc = c * w;

  std::complex<double> base;
  switch (model.family()) {
    case Family::normal:
      base = std::exp(-0.5 * model.normal_variance() * wc * wc);
      break;
    case Family::laplace: {
      const double s = model.laplace_s();
      base = 2.0 / (2.0 + s * s * wc * wc);
      break;
    }
    case Family::centered_gamma: {
      const double t = model.gamma_t();
      base = std::exp(std::complex<double>(0.0, -t * wc)) *
             std::pow(std::complex<double>(1.0, -wc), -t);
      break;
    }
    case Family::sech:
      base = 1.0 / std::cosh(wc);
      break;
    case Family::uniform: {
      const double a = model.uniform_halfwidth();
      base = (wc == 0.0) ? 1.0 : std::sin(a * wc) / (a * wc);
      break;
    }
    case Family::compound_poisson: {
      const double rate = model.cp_rate();
      const JumpSpec& j = model.cp_jump();
      auto pdf = j.pdf;
      QuadOptions opts{1e-12, 1e-12, 8000};
      const double re = integrate_gk(
          [&](double u) { return pdf(u) * std::cos(u * wc); }, j.lo, j.hi,
          opts).value;
      const double im = integrate_gk(
          [&](double u) { return pdf(u) * std::sin(u * wc); }, j.lo, j.hi,
          opts).value;
      base = std::exp(rate * (std::complex<double>(re, im) - 1.0));
      break;
    }
    case Family::generic_id: {
      const LevyTriple& t = model.generic_triple();
      std::complex<double> jump = t.jumps.integrate_complex(
          [wc](double x) -> std::complex<double> {
            if (std::abs(x * wc) < 1e-8) return {-0.5 * wc * wc, 0.0};
            return (std::exp(std::complex<double>(0.0, x * wc)) - 1.0 -
                    std::complex<double>(0.0, x * wc)) /
                   (x * x);
          },
          QuadOptions{1e-12, 1e-12, 8000});
      base = std::exp(1i * t.drift * wc - 0.5 * t.gaussian_var * wc * wc + jump);
      break;
    }
  }
  return std::exp(1i * b * w) * base;
}

NoiseModel convolve(const NoiseModel& a, const NoiseModel& b) {
  if (!a.infinitely_divisible() || !b.infinitely_divisible())
    throw unsupported_model_error(
        "convolve: both operands must be infinitely divisible");
  if (a.family() == Family::normal && b.family() == Family::normal) {
    NoiseModel out = NoiseModel::normal(a.variance() + b.variance());
    return shift(out, a.mean() + b.mean());
  }
  LevyTriple ta = levy_view(a);
  LevyTriple tb = levy_view(b);
  LevyTriple sum;
  sum.drift = ta.drift + tb.drift;
  sum.gaussian_var = ta.gaussian_var + tb.gaussian_var;
  sum.jumps = MeasureSpec::merged(ta.jumps, tb.jumps);
  return NoiseModel::generic(std::move(sum));
}

NoiseModel scale(const NoiseModel& model, double c) {
  if (c == 0.0)
    throw std::invalid_argument("scale: factor 0 gives a degenerate law");
  NoiseModel out = model;
  out.scale_ *= c;
  out.shift_ *= c;
  out.mean_ *= c;
  out.variance_ *= c * c;
  return out;
}

NoiseModel shift(const NoiseModel& model, double b) {
  NoiseModel out = model;
  out.shift_ += b;
  out.mean_ += b;
  return out;
}

NoiseModel clt_normalize(const NoiseModel& model, int n) {
  if (n < 1) throw std::invalid_argument("clt_normalize: n must be >= 1");
  if (!model.infinitely_divisible())
    throw unsupported_model_error("clt_normalize: model must be infinitely divisible");
  if (std::abs(model.mean()) > 1e-9 * std::max(1.0, model.sd()))
    throw std::invalid_argument("clt_normalize: model must have mean zero");
  if (n == 1 || model.family() == Family::normal) return model;

  const double root = std::sqrt(static_cast<double>(n));
  LevyTriple t = levy_view(model);
  LevyTriple out;
  out.drift = 0.0;
  out.gaussian_var = t.gaussian_var;  // n * (1/sqrt(n))^2
  out.jumps = t.jumps.scaled(1.0 / root).weighted(static_cast<double>(n));
  return NoiseModel::generic(std::move(out));
}

std::optional<DensityView> density(const NoiseModel& model) {
  const double c = model.scale_factor();
  const double b = model.offset();

  std::function<double(double)> base;
  double lo = 0.0, hi = 0.0;
  switch (model.family()) {
    case Family::normal: {
      const double v = model.normal_variance();
      const double sd = std::sqrt(v);
      base = [v](double x) {
        return std::exp(-0.5 * x * x / v) / std::sqrt(2.0 * M_PI * v);
      };
      lo = -13.5 * sd;
      hi = 13.5 * sd;
      break;
    }
    case Family::laplace: {
      const double s = model.laplace_s();
      base = [s](double x) {
        return std::exp(-kSqrt2 * std::abs(x) / s) / (kSqrt2 * s);
      };
      lo = -30.0 * s;
      hi = 30.0 * s;
      break;
    }
    case Family::centered_gamma: {
      const double t = model.gamma_t();
      const double lg = std::lgamma(t);
      base = [t, lg](double x) {
        const double u = x + t;
        if (u <= 0.0) return 0.0;
        return std::exp((t - 1.0) * std::log(u) - u - lg);
      };
      lo = -t;
      hi = 40.0 + 12.0 * std::sqrt(t);
      break;
    }
    case Family::sech:
      base = [](double x) { return 0.5 / std::cosh(0.5 * M_PI * x); };
      lo = -28.0;
      hi = 28.0;
      break;
    case Family::uniform: {
      const double a = model.uniform_halfwidth();
      base = [a](double x) {
        return (x > -a && x < a) ? 0.5 / a : 0.0;
      };
      lo = -a;
      hi = a;
      break;
    }
    case Family::compound_poisson:
    case Family::generic_id:
      return std::nullopt;
  }

  DensityView view;
  const double ac = std::abs(c);
  view.pdf = [base, c, b, ac](double x) { return base((x - b) / c) / ac; };
  const double e1 = c * lo + b;
  const double e2 = c * hi + b;
  view.lo = std::min(e1, e2);
  view.hi = std::max(e1, e2);
  return view;
}

JumpSpec gaussian_jumps(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("gaussian jumps: sd <= 0");
  JumpSpec j;
  j.pdf = [mean, sd](double u) {
    const double z = (u - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
  };
  j.lo = mean - 12.0 * sd;
  j.hi = mean + 12.0 * sd;
  j.mean = mean;
  j.second_moment = mean * mean + sd * sd;
  j.sampler = [mean, sd](CounterRng& rng) {
    return mean + sd * rng.next_normal();
  };
  return j;
}

JumpSpec uniform_jumps(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform jumps: empty support");
  JumpSpec j;
  const double inv = 1.0 / (hi - lo);
  j.pdf = [lo, hi, inv](double u) { return (u >= lo && u <= hi) ? inv : 0.0; };
  j.lo = lo;
  j.hi = hi;
  j.mean = 0.5 * (lo + hi);
  j.second_moment = (hi * hi * hi - lo * lo * lo) / (3.0 * (hi - lo));
  j.quantile = [lo, hi](double u) { return lo + u * (hi - lo); };
  return j;
}

JumpSpec exponential_jumps(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential jumps: rate <= 0");
  JumpSpec j;
  j.pdf = [rate](double u) { return u >= 0.0 ? rate * std::exp(-rate * u) : 0.0; };
  j.lo = 0.0;
  j.hi = 50.0 / rate;
  j.mean = 1.0 / rate;
  j.second_moment = 2.0 / (rate * rate);
  j.quantile = [rate](double u) { return -std::log1p(-u) / rate; };
  return j;
}

}  // namespace sureid
