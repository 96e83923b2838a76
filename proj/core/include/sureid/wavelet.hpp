// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sureid/noise_model.hpp"
#include "sureid/stein_kernel.hpp"

namespace sureid {

enum class Wavelet { haar, d4 };

Wavelet wavelet_from_string(const std::string& name);

/// One detail band: level 1 is the finest. `noise` is filled by the
/// denoising pipeline with the propagated law for this level.
struct LevelCoeffs {
  int level = 0;
  std::vector<double> coeffs;
  std::optional<NoiseModel> noise;
  std::size_t n_total = 0;
};

struct DwtResult {
  Wavelet wavelet = Wavelet::haar;
  int levels = 0;
  std::size_t n = 0;
  std::vector<LevelCoeffs> details;  // index 0 = level 1 (finest)
  std::vector<double> scaling;       // coarsest approximation band
};

/// Orthonormal periodic DWT. signal.size() must be a multiple of 2^levels.
DwtResult dwt(std::span<const double> signal, Wavelet wavelet, int levels);

/// Exact inverse of dwt (energy preserved to roundoff).
std::vector<double> idwt(const DwtResult& transform);

/// Effective analysis filter of the level's detail band, folded modulo the
/// signal length: a detail coefficient is the dot product of these taps
/// with a window of the input.
std::vector<double> level_taps(Wavelet wavelet, int level,
                               std::size_t signal_len);

/// The law of sum_k c_k eps_k for the level's taps c_k and iid eps ~ input:
/// repeated scale-and-convolve on the Lévy triple. Exact variance
/// bookkeeping; many-tap levels are consolidated to a tabulated density.
NoiseModel propagate_noise(const NoiseModel& input, Wavelet wavelet, int level,
                           std::size_t signal_len);

/// Variance of the propagated law (cheap, no kernel construction).
double propagated_variance(const NoiseModel& input, Wavelet wavelet, int level,
                           std::size_t signal_len);

struct ThresholdChoice {
  int level = 0;
  double lambda = 0.0;
  double risk = 0.0;  // sum of per-coefficient risk estimates at lambda
  std::size_t candidate_count = 0;
};

/// sqrt(2 log n) times the noise sd; the cap on candidate thresholds.
double universal_threshold(std::size_t n_total, double noise_sd);

/// Minimizes the summed unbiased risk of soft thresholding over the
/// candidate set {0} with all |coefficient| values clipped to the universal
/// threshold cap, ties broken by the largest lambda. max_candidates > 0
/// subsamples the candidate set (the endpoints are always kept).
ThresholdChoice sure_select(std::span<const double> coeffs,
                            const SteinOperator& K, std::size_t n_total,
                            std::size_t max_candidates = 0);

/// Per-level noise laws and Stein operators, reusable across signals with
/// the same length, wavelet and noise model.
struct DenoisePlan {
  Wavelet wavelet = Wavelet::haar;
  int levels = 0;
  int keep_low = 1;
  std::size_t n = 0;
  // index 0 = level 1; nullopt for bands that pass through unthresholded
  std::vector<std::optional<SteinOperator>> ops;
  std::vector<double> level_variance;
};

/// keep_low counts the coarsest bands left untouched, the scaling band
/// first: keep_low = 1 passes only the scaling band, 2 also the coarsest
/// detail level, and so on.
DenoisePlan make_denoise_plan(const NoiseModel& noise, Wavelet wavelet,
                              int levels, std::size_t signal_len,
                              int keep_low = 1, const KernelOptions& opts = {});

struct DenoiseResult {
  std::vector<double> denoised;
  std::vector<ThresholdChoice> report;  // one entry per detail level
  std::vector<bool> thresholded;        // parallel to report
};

DenoiseResult denoise(std::span<const double> signal, const DenoisePlan& plan,
                      std::optional<double> force_lambda = std::nullopt);

DenoiseResult denoise(std::span<const double> signal, Wavelet wavelet,
                      int levels, const NoiseModel& noise, int keep_low = 1,
                      const KernelOptions& opts = {},
                      std::optional<double> force_lambda = std::nullopt);

}  // namespace sureid
