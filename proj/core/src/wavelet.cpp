// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include "sureid/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "sureid/errors.hpp"

namespace sureid {

namespace {

const std::vector<double>& lowpass(Wavelet w) {
  static const std::vector<double> haar = {M_SQRT1_2, M_SQRT1_2};
  static const std::vector<double> d4 = [] {
    const double s3 = std::sqrt(3.0);
    const double k = 1.0 / (4.0 * M_SQRT2);
    return std::vector<double>{(1.0 + s3) * k, (3.0 + s3) * k, (3.0 - s3) * k,
                               (1.0 - s3) * k};
  }();
  return w == Wavelet::haar ? haar : d4;
}

std::vector<double> highpass(Wavelet w) {
  const auto& h = lowpass(w);
  std::vector<double> g(h.size());
  for (std::size_t k = 0; k < h.size(); ++k)
    g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[h.size() - 1 - k];
  return g;
}

void analysis_pass(std::span<const double> in, const std::vector<double>& h,
                   const std::vector<double>& g, std::vector<double>& approx,
                   std::vector<double>& detail) {
  const std::size_t n = in.size();
  const std::size_t half = n / 2;
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (std::size_t m = 0; m < h.size(); ++m) {
      const double x = in[(2 * k + m) % n];
      a += h[m] * x;
      d += g[m] * x;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

std::vector<double> synthesis_pass(std::span<const double> approx,
                                   std::span<const double> detail,
                                   const std::vector<double>& h,
                                   const std::vector<double>& g) {
  const std::size_t half = approx.size();
  const std::size_t n = 2 * half;
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    for (std::size_t m = 0; m < h.size(); ++m) {
      out[(2 * k + m) % n] += h[m] * approx[k] + g[m] * detail[k];
    }
  }
  return out;
}

}  // namespace

Wavelet wavelet_from_string(const std::string& name) {
  if (name == "haar") return Wavelet::haar;
  if (name == "d4") return Wavelet::d4;
  throw std::invalid_argument("unknown wavelet '" + name + "' (haar, d4)");
}

DwtResult dwt(std::span<const double> signal, Wavelet wavelet, int levels) {
  if (levels < 1) throw std::invalid_argument("dwt: levels must be >= 1");
  const std::size_t n = signal.size();
  if (n == 0 || n % (std::size_t{1} << levels) != 0)
    throw std::invalid_argument(
        "dwt: signal length must be a nonzero multiple of 2^levels");

  const auto& h = lowpass(wavelet);
  const auto g = highpass(wavelet);

  DwtResult out;
  out.wavelet = wavelet;
  out.levels = levels;
  out.n = n;

  std::vector<double> current(signal.begin(), signal.end());
  for (int lvl = 1; lvl <= levels; ++lvl) {
    std::vector<double> approx, detail;
    analysis_pass(current, h, g, approx, detail);
    LevelCoeffs lc;
    lc.level = lvl;
    lc.coeffs = std::move(detail);
    lc.n_total = n;
    out.details.push_back(std::move(lc));
    current = std::move(approx);
  }
  out.scaling = std::move(current);
  return out;
}

std::vector<double> idwt(const DwtResult& transform) {
  const auto& h = lowpass(transform.wavelet);
  const auto g = highpass(transform.wavelet);

  std::vector<double> current = transform.scaling;
  for (int lvl = transform.levels; lvl >= 1; --lvl) {
    const auto& detail = transform.details[lvl - 1].coeffs;
    if (detail.size() != current.size())
      throw std::invalid_argument("idwt: inconsistent band sizes");
    current = synthesis_pass(current, detail, h, g);
  }
  return current;
}

std::vector<double> level_taps(Wavelet wavelet, int level,
                               std::size_t signal_len) {
  if (level < 1) throw std::invalid_argument("level_taps: level must be >= 1");
  if (signal_len == 0 || signal_len % (std::size_t{1} << level) != 0)
    throw std::invalid_argument(
        "level_taps: signal length must be a multiple of 2^level");

  const auto& h = lowpass(wavelet);
  std::vector<double> taps = highpass(wavelet);
  for (int l = 2; l <= level; ++l) {
    // upsample previous taps by 2, convolve with the lowpass
    std::vector<double> up(2 * taps.size() - 1, 0.0);
    for (std::size_t i = 0; i < taps.size(); ++i) up[2 * i] = taps[i];
    std::vector<double> next(up.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < up.size(); ++i) {
      if (up[i] == 0.0) continue;
      for (std::size_t j = 0; j < h.size(); ++j) next[i + j] += up[i] * h[j];
    }
    taps = std::move(next);
  }

  std::vector<double> folded(std::min<std::size_t>(signal_len, taps.size()), 0.0);
  if (taps.size() <= signal_len) {
    folded = taps;
  } else {
    folded.assign(signal_len, 0.0);
    for (std::size_t i = 0; i < taps.size(); ++i)
      folded[i % signal_len] += taps[i];
  }
  return folded;
}

NoiseModel propagate_noise(const NoiseModel& input, Wavelet wavelet, int level,
                           std::size_t signal_len) {
  if (!input.infinitely_divisible())
    throw unsupported_model_error(
        "propagate_noise: uniform noise is not infinitely divisible; its "
        "convolutions leave the supported family");

  const std::vector<double> taps = level_taps(wavelet, level, signal_len);

  if (input.family() == Family::normal && input.offset() == 0.0) {
    double s2 = 0.0;
    for (double c : taps) s2 += c * c;
    return NoiseModel::normal(s2 * input.variance());
  }

  const LevyTriple t = levy_view(input);

  // group equal taps so stable filters (Haar) keep exact arithmetic
  std::map<double, int> groups;
  for (double c : taps) {
    if (std::abs(c) < 1e-14) continue;
    ++groups[c];
  }

  LevyTriple out;
  MeasureSpec jumps;
  for (const auto& [c, count] : groups) {
    const double w = static_cast<double>(count);
    out.drift += w * c * t.drift;
    out.gaussian_var += w * c * c * t.gaussian_var;
    MeasureSpec piece = t.jumps.scaled(c);
    if (count > 1) piece = piece.weighted(w);
    jumps = MeasureSpec::merged(jumps, piece);
  }
  if (jumps.components().size() > 8) jumps = jumps.consolidated();
  out.jumps = std::move(jumps);
  return NoiseModel::generic(std::move(out));
}

double propagated_variance(const NoiseModel& input, Wavelet wavelet, int level,
                           std::size_t signal_len) {
  double s2 = 0.0;
  for (double c : level_taps(wavelet, level, signal_len)) s2 += c * c;
  return s2 * input.variance();
}

double universal_threshold(std::size_t n_total, double noise_sd) {
  const double n = static_cast<double>(std::max<std::size_t>(n_total, 2));
  return std::sqrt(2.0 * std::log(n)) * noise_sd;
}

ThresholdChoice sure_select(std::span<const double> coeffs,
                            const SteinOperator& K, std::size_t n_total,
                            std::size_t max_candidates) {
  if (coeffs.empty())
    throw std::invalid_argument("sure_select: empty coefficient array");
  if (std::abs(K.drift()) > 1e-9 * std::max(1.0, std::sqrt(K.variance())))
    throw std::invalid_argument("sure_select: noise model must be centered");

  const double var = K.variance();
  const double cap = universal_threshold(n_total, std::sqrt(var));

  std::vector<double> candidates;
  candidates.reserve(coeffs.size() + 2);
  candidates.push_back(0.0);
  for (double x : coeffs) candidates.push_back(std::min(std::abs(x), cap));
  candidates.push_back(cap);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  if (max_candidates > 2 && candidates.size() > max_candidates) {
    std::vector<double> sub;
    sub.reserve(max_candidates);
    const double stride = static_cast<double>(candidates.size() - 1) /
                          static_cast<double>(max_candidates - 1);
    for (std::size_t i = 0; i < max_candidates; ++i)
      sub.push_back(candidates[static_cast<std::size_t>(i * stride + 0.5)]);
    sub.back() = candidates.back();
    sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
    candidates = std::move(sub);
  }

  auto total_risk = [&](double lambda) {
    double s = 0.0;
    for (double x : coeffs) {
      const double shrink = std::min(std::abs(x), lambda);
      s += var + shrink * shrink +
           2.0 * (K.hinge(x - lambda) - K.hinge(x + lambda));
    }
    return s;
  };

  // Sweep the candidate set, then refine. The summed estimate is smooth in
  // lambda between data points with its minima generically off the data
  // values; for noise with a Gaussian part it additionally steps down just
  // above each |x_i| (the shrink indicator switches there). So evaluate
  // every candidate and its upper neighbour value, probe the interval
  // interiors, and polish the best brackets by golden section. Exact ties
  // go to the largest lambda, so a flat objective still selects the cap.
  struct Eval {
    double lambda, risk;
  };
  auto better = [](const Eval& e, const Eval& best) {
    return e.risk < best.risk || (e.risk == best.risk && e.lambda > best.lambda);
  };

  // coarse grid: candidates plus three interior probes per gap
  std::vector<Eval> grid;
  grid.reserve(4 * candidates.size());
  for (double lambda : candidates) grid.push_back({lambda, total_risk(lambda)});
  for (std::size_t i = 0; i + 1 < candidates.size(); ++i) {
    const double a = candidates[i], b = candidates[i + 1];
    for (double frac : {0.25, 0.5, 0.75})
      grid.push_back({a + frac * (b - a), total_risk(a + frac * (b - a))});
  }
  std::sort(grid.begin(), grid.end(),
            [](const Eval& a, const Eval& b) { return a.lambda < b.lambda; });

  Eval best = grid.front();
  for (const auto& e : grid)
    if (better(e, best)) best = e;
  // step just past each candidate: with a Gaussian atom the objective drops
  // there (the shrink indicator switches at |x_i|)
  for (double lambda : candidates) {
    const double up = std::nextafter(lambda, cap + 1.0);
    const Eval e{up, total_risk(up)};
    if (better(e, best)) best = e;
  }

  // golden-section polish inside the brackets around the lowest grid values
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return grid[a].risk < grid[b].risk;
  });
  const std::size_t polish = std::min<std::size_t>(8, order.size());
  const double phi = 0.6180339887498949;
  for (std::size_t k = 0; k < polish; ++k) {
    const std::size_t i = order[k];
    double lo = i > 0 ? grid[i - 1].lambda : grid[i].lambda;
    double hi = i + 1 < grid.size() ? grid[i + 1].lambda : grid[i].lambda;
    if (!(hi > lo)) continue;
    Eval ec{hi - phi * (hi - lo), 0.0}, ed{lo + phi * (hi - lo), 0.0};
    ec.risk = total_risk(ec.lambda);
    ed.risk = total_risk(ed.lambda);
    for (int it = 0; it < 72 && hi - lo > 0.0; ++it) {
      if (ec.risk < ed.risk) {
        hi = ed.lambda;
        ed = ec;
        ec.lambda = hi - phi * (hi - lo);
        ec.risk = total_risk(ec.lambda);
      } else {
        lo = ec.lambda;
        ec = ed;
        ed.lambda = lo + phi * (hi - lo);
        ed.risk = total_risk(ed.lambda);
      }
      if (better(ec, best)) best = ec;
      if (better(ed, best)) best = ed;
    }
  }

  ThresholdChoice choice;
  choice.candidate_count = candidates.size();
  choice.lambda = std::min(best.lambda, cap);
  choice.risk = best.risk;
  return choice;
}

DenoisePlan make_denoise_plan(const NoiseModel& noise, Wavelet wavelet,
                              int levels, std::size_t signal_len, int keep_low,
                              const KernelOptions& opts) {
  if (keep_low < 1 || keep_low > levels + 1)
    throw std::invalid_argument(
        "make_denoise_plan: keep_low must be in [1, levels + 1]");
  DenoisePlan plan;
  plan.wavelet = wavelet;
  plan.levels = levels;
  plan.keep_low = keep_low;
  plan.n = signal_len;
  plan.ops.resize(levels);
  plan.level_variance.resize(levels, 0.0);

  // detail level l is thresholded iff l <= levels - (keep_low - 1)
  const int threshold_up_to = levels - (keep_low - 1);
  for (int l = 1; l <= levels; ++l) {
    plan.level_variance[l - 1] =
        propagated_variance(noise, wavelet, l, signal_len);
    if (l <= threshold_up_to) {
      NoiseModel level_noise = propagate_noise(noise, wavelet, l, signal_len);
      plan.ops[l - 1].emplace(level_noise, opts);
    }
  }
  return plan;
}

DenoiseResult denoise(std::span<const double> signal, const DenoisePlan& plan,
                      std::optional<double> force_lambda) {
  DwtResult tf = dwt(signal, plan.wavelet, plan.levels);

  DenoiseResult out;
  out.report.resize(plan.levels);
  out.thresholded.assign(plan.levels, false);

  for (int l = 1; l <= plan.levels; ++l) {
    LevelCoeffs& band = tf.details[l - 1];
    ThresholdChoice& choice = out.report[l - 1];
    choice.level = l;

    if (!plan.ops[l - 1]) continue;  // pass-through band

    const SteinOperator& K = *plan.ops[l - 1];
    band.noise = K.model();
    if (force_lambda) {
      choice.lambda = *force_lambda;
      choice.candidate_count = 0;
      double s = 0.0;
      for (double x : band.coeffs) {
        const double shrink = std::min(std::abs(x), choice.lambda);
        s += K.variance() + shrink * shrink +
             2.0 * (K.hinge(x - choice.lambda) - K.hinge(x + choice.lambda));
      }
      choice.risk = s;
    } else {
      choice = sure_select(band.coeffs, K, plan.n);
      choice.level = l;
    }
    out.thresholded[l - 1] = true;

    for (double& x : band.coeffs)
      x = std::copysign(std::max(std::abs(x) - choice.lambda, 0.0), x);
  }

  out.denoised = idwt(tf);
  return out;
}

DenoiseResult denoise(std::span<const double> signal, Wavelet wavelet,
                      int levels, const NoiseModel& noise, int keep_low,
                      const KernelOptions& opts,
                      std::optional<double> force_lambda) {
  const DenoisePlan plan =
      make_denoise_plan(noise, wavelet, levels, signal.size(), keep_low, opts);
  return denoise(signal, plan, force_lambda);
}

}  // namespace sureid
