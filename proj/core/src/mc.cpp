// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include "sureid/mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

#include "sureid/errors.hpp"
#include "sureid/quadrature.hpp"

namespace sureid {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr std::size_t kBlock = 4096;

double laplace_quantile_unit(double u) {
  // unit variance
  return u < 0.5 ? std::log(2.0 * u) / kSqrt2
                 : -std::log(2.0 * (1.0 - u)) / kSqrt2;
}

double sech_quantile(double u) {
  return (2.0 / M_PI) * std::log(std::tan(0.5 * M_PI * u));
}

double gamma_draw(CounterRng& rng, double t) {
  // Marsaglia-Tsang
  if (t < 1.0) {
    const double u = rng.next_open();
    return gamma_draw(rng, t + 1.0) * std::pow(u, 1.0 / t);
  }
  const double d = t - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.next_normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_open();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::size_t poisson_small(CounterRng& rng, double rate) {
  const double limit = std::exp(-rate);
  std::size_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.next_double();
  } while (p > limit);
  return k - 1;
}

std::size_t poisson_draw(CounterRng& rng, double rate) {
  std::size_t total = 0;
  while (rate > 30.0) {
    total += poisson_small(rng, 30.0);
    rate -= 30.0;
  }
  return total + poisson_small(rng, rate);
}

// Inverse CDF tabulated from a (not necessarily normalized) density.
class TabulatedQuantile {
 public:
  TabulatedQuantile(const std::function<double(double)>& pdf, double lo,
                    double hi, int cells = 4096)
      : lo_(lo), step_((hi - lo) / cells) {
    cdf_.resize(cells + 1, 0.0);
    long double acc = 0.0L;
    for (int i = 0; i < cells; ++i) {
      acc += gauss_legendre_8(pdf, lo_ + i * step_, lo_ + (i + 1) * step_);
      cdf_[i + 1] = static_cast<double>(acc);
    }
    const double total = cdf_.back();
    if (!(total > 0.0))
      throw std::invalid_argument("tabulated quantile: zero-mass density");
    for (auto& v : cdf_) v /= total;
    cdf_.back() = 1.0;
  }

  double operator()(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = std::min<std::size_t>(
        cdf_.size() - 2, it == cdf_.begin() ? 0 : (it - cdf_.begin()) - 1);
    const double c0 = cdf_[i], c1 = cdf_[i + 1];
    const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return lo_ + (static_cast<double>(i) + frac) * step_;
  }

 private:
  double lo_, step_;
  std::vector<double> cdf_;
};

std::function<double(CounterRng&)> jump_drawer(const JumpSpec& spec) {
  if (spec.sampler) return spec.sampler;
  if (spec.quantile) {
    auto q = spec.quantile;
    return [q](CounterRng& rng) { return q(rng.next_open()); };
  }
  auto tab = std::make_shared<TabulatedQuantile>(spec.pdf, spec.lo, spec.hi);
  return [tab](CounterRng& rng) { return (*tab)(rng.next_open()); };
}

// Compound-Poisson approximation of a generic triple: jumps with |u| >= eps
// sampled exactly from the classical Lévy density m(u)/u^2, smaller jumps
// folded into the Gaussian part, the mean restored by a compensating drift.
struct GenericSampler {
  double drift = 0.0;
  double gauss_sd = 0.0;
  double compensator = 0.0;
  double total_rate = 0.0;
  struct Piece {
    double rate;
    std::function<double(CounterRng&)> draw;
  };
  std::vector<Piece> pieces;
  double approx_tol = 0.0;

  explicit GenericSampler(const LevyTriple& t) {
    const double var = t.variance();
    const double sigma = std::sqrt(var);
    drift = t.drift;

    const QuadOptions qo{1e-12, 1e-12, 6000};
    auto mass_near_zero = [&](double eps) {
      double m = 0.0;
      for (const auto& c : t.jumps.components()) {
        const double a = std::max(c.lo(), -eps);
        const double b = std::min(c.hi(), eps);
        if (a < b) {
          const double zero[] = {0.0};
          m += integrate_gk_split([&](double u) { return c.density(u); }, a, b,
                                  zero, qo).value;
        }
      }
      return m;
    };

    double eps = 1e-3 * sigma;
    double fold = mass_near_zero(eps);
    while (fold > 1e-6 * var && eps > 1e-9 * sigma) {
      eps *= 0.5;
      fold = mass_near_zero(eps);
    }
    if (fold > 1e-6 * var)
      throw std::invalid_argument(
          "generic sampler: jump measure cannot be normalized (too much mass "
          "near the origin)");
    approx_tol = fold / var;

    for (const auto& c : t.jumps.components()) {
      auto nu = [c](double u) { return c.density(u) / (u * u); };
      const std::pair<double, double> sides[2] = {
          {c.lo(), std::min(c.hi(), -eps)}, {std::max(c.lo(), eps), c.hi()}};
      for (const auto& [a, b] : sides) {
        if (!(a < b)) continue;
        const double rate = integrate_gk(nu, a, b, qo).value;
        if (rate <= 0.0) continue;
        compensator +=
            integrate_gk([&c](double u) { return c.density(u) / u; }, a, b, qo)
                .value;
        auto tab = std::make_shared<TabulatedQuantile>(nu, a, b);
        pieces.push_back(
            {rate, [tab](CounterRng& rng) { return (*tab)(rng.next_open()); }});
      }
    }
    for (const auto& atom : t.jumps.atoms()) {
      const double rate = atom.mass / (atom.location * atom.location);
      const double loc = atom.location;
      compensator += atom.mass / atom.location;
      pieces.push_back({rate, [loc](CounterRng&) { return loc; }});
    }

    for (const auto& p : pieces) total_rate += p.rate;
    if (total_rate > 1e7)
      throw std::invalid_argument(
          "generic sampler: jump measure cannot be normalized within the "
          "sampling budget (rate too large)");
    gauss_sd = std::sqrt(t.gaussian_var + fold);
  }

  double draw(CounterRng& rng) const {
    double v = drift - compensator;
    if (gauss_sd > 0.0) v += gauss_sd * rng.next_normal();
    if (total_rate > 0.0) {
      const std::size_t n = poisson_draw(rng, total_rate);
      for (std::size_t i = 0; i < n; ++i) {
        double pick = rng.next_double() * total_rate;
        std::size_t j = 0;
        while (j + 1 < pieces.size() && pick >= pieces[j].rate) {
          pick -= pieces[j].rate;
          ++j;
        }
        v += pieces[j].draw(rng);
      }
    }
    return v;
  }
};

// Deterministic block-parallel reduction: each 4096-draw block has its own
// substream and its partial sums are combined in block order, so results
// do not depend on the number of threads.
template <std::size_t NSums, class BlockFn>
std::array<double, NSums> run_blocks(std::size_t n, int threads,
                                     const BlockFn& fn) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<std::array<double, NSums>> partials(nblocks);

  auto worker = [&](std::size_t first) {
    for (std::size_t b = first; b < nblocks; b += std::max(threads, 1)) {
      const std::size_t count = std::min(kBlock, n - b * kBlock);
      fn(b, count, partials[b]);
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }

  std::array<long double, NSums> acc{};
  for (const auto& p : partials)
    for (std::size_t k = 0; k < NSums; ++k) acc[k] += p[k];
  std::array<double, NSums> out{};
  for (std::size_t k = 0; k < NSums; ++k) out[k] = static_cast<double>(acc[k]);
  return out;
}

}  // namespace

ModelSampler::ModelSampler(const NoiseModel& model) {
  const double c = model.scale_factor();
  const double b = model.offset();
  switch (model.family()) {
    case Family::normal: {
      const double mean = model.mean();
      const double sd = model.sd();
      draw_ = [mean, sd](CounterRng& rng) { return mean + sd * rng.next_normal(); };
      break;
    }
    case Family::laplace: {
      const double k = c * model.laplace_s();
      draw_ = [k, b](CounterRng& rng) {
        return b + k * laplace_quantile_unit(rng.next_open());
      };
      break;
    }
    case Family::centered_gamma: {
      const double t = model.gamma_t();
      draw_ = [t, c, b](CounterRng& rng) {
        return b + c * (gamma_draw(rng, t) - t);
      };
      break;
    }
    case Family::sech:
      draw_ = [c, b](CounterRng& rng) {
        return b + c * sech_quantile(rng.next_open());
      };
      break;
    case Family::uniform: {
      const double a = model.uniform_halfwidth();
      draw_ = [a, c, b](CounterRng& rng) {
        return b + c * a * (2.0 * rng.next_double() - 1.0);
      };
      break;
    }
    case Family::compound_poisson: {
      const double rate = model.cp_rate();
      auto jd = jump_drawer(model.cp_jump());
      draw_ = [rate, jd, c, b](CounterRng& rng) {
        const std::size_t n = poisson_draw(rng, rate);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += jd(rng);
        return b + c * s;
      };
      break;
    }
    case Family::generic_id: {
      auto gs = std::make_shared<GenericSampler>(levy_view(model));
      approx_tol_ = gs->approx_tol;
      draw_ = [gs](CounterRng& rng) { return gs->draw(rng); };
      break;
    }
  }
}

double ModelSampler::draw(CounterRng& rng) const { return draw_(rng); }

SampleBatch sample(const NoiseModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  ModelSampler sampler(model);
  SampleBatch batch;
  batch.model = model.describe();
  batch.seed = seed;
  batch.approx_tol = sampler.approx_tol();
  batch.values.resize(n);
  CounterRng rng(seed, 0);
  for (std::size_t i = 0; i < n; ++i) batch.values[i] = sampler.draw(rng);
  return batch;
}

namespace {

SteinCheck stein_check_impl(const ModelSampler& sampler,
                            const std::function<double(double)>& g,
                            const std::function<double(double)>& Kg,
                            double theta, std::size_t n, std::uint64_t seed,
                            int threads) {
  if (n < 2) throw std::invalid_argument("mc_stein_check: n must be >= 2");
  auto sums = run_blocks<4>(
      n, threads,
      [&](std::size_t block, std::size_t count, std::array<double, 4>& acc) {
        CounterRng rng(seed, block + 1);
        double sl = 0.0, sr = 0.0, sd = 0.0, sd2 = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
          const double x = sampler.draw(rng);
          const double l = Kg(x + theta);
          const double r = x * g(x + theta);
          const double d = l - r;
          sl += l;
          sr += r;
          sd += d;
          sd2 += d * d;
        }
        acc = {sl, sr, sd, sd2};
      });

  SteinCheck out;
  const double dn = static_cast<double>(n);
  out.lhs = sums[0] / dn;
  out.rhs = sums[1] / dn;
  const double var_d =
      std::max(0.0, (sums[3] - sums[2] * sums[2] / dn) / (dn - 1.0));
  out.se = std::sqrt(var_d / dn);
  return out;
}

}  // namespace

SteinCheck mc_stein_check(const SteinOperator& K, const EstimatorExpr& g,
                          double theta, std::size_t n, std::uint64_t seed,
                          int threads) {
  ModelSampler sampler(K.model());
  auto gfn = [&g](double x) { return g(x); };
  auto kfn = [&K, &g](double x) { return K.apply(g, x); };
  return stein_check_impl(sampler, gfn, kfn, theta, n, seed, threads);
}

SteinCheck mc_stein_check(const NoiseModel& model,
                          const std::function<double(double)>& g,
                          const std::function<double(double)>& Kg, double theta,
                          std::size_t n, std::uint64_t seed, int threads) {
  ModelSampler sampler(model);
  return stein_check_impl(sampler, g, Kg, theta, n, seed, threads);
}

McRisk mc_risk(const NoiseModel& model, const EstimatorExpr& d, double theta,
               std::size_t n, std::uint64_t seed, int threads) {
  if (n < 2) throw std::invalid_argument("mc_risk: n must be >= 2");
  ModelSampler sampler(model);
  auto sums = run_blocks<2>(
      n, threads,
      [&](std::size_t block, std::size_t count, std::array<double, 2>& acc) {
        CounterRng rng(seed, block + 1);
        double sv = 0.0, sv2 = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
          const double x = sampler.draw(rng);
          const double e = d(x + theta) - theta;
          const double v = e * e;
          sv += v;
          sv2 += v * v;
        }
        acc = {sv, sv2};
      });

  McRisk out;
  const double dn = static_cast<double>(n);
  out.risk = sums[0] / dn;
  const double var_v =
      std::max(0.0, (sums[1] - sums[0] * sums[0] / dn) / (dn - 1.0));
  out.se = std::sqrt(var_v / dn);
  return out;
}

}  // namespace sureid
