// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sureid/mc.hpp"
#include "sureid/risk.hpp"
#include "sureid/stein_kernel.hpp"
#include "sureid/wavelet.hpp"

namespace {

using namespace sureid;

void BM_HingeKernelBuildSech(benchmark::State& state) {
  const auto triple = levy_view(NoiseModel::sech());
  for (auto _ : state) {
    auto k = HingeKernel::tabulated(triple, {});
    benchmark::DoNotOptimize(k(0.5));
  }
}
BENCHMARK(BM_HingeKernelBuildSech)->Unit(benchmark::kMillisecond);

void BM_ApplyK(benchmark::State& state) {
  SteinOperator K(NoiseModel::sech());
  const auto g = residual(soft_expr(2.0));
  double x = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(K.apply(g, x));
    x += 0.01;
    if (x > 4.0) x = -4.0;
  }
}
BENCHMARK(BM_ApplyK);

void BM_LevyKLaplaceHinge(benchmark::State& state) {
  const auto lap = NoiseModel::laplace();
  auto g0p = [](double u) { return std::max(u, 0.0); };
  const double kink[] = {0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(levy_K(lap, g0p, 0.7, kink).value);
  }
}
BENCHMARK(BM_LevyKLaplaceHinge)->Unit(benchmark::kMicrosecond);

void BM_UnbiasedRiskCurve(benchmark::State& state) {
  SteinOperator K(NoiseModel::laplace());
  const auto d = soft_expr(2.0);
  for (auto _ : state) {
    double acc = 0.0;
    for (double x = -6.0; x <= 6.0; x += 0.01)
      acc += unbiased_risk(K, d, x).value;
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_UnbiasedRiskCurve)->Unit(benchmark::kMillisecond);

void BM_SureSelect(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  SteinOperator K(NoiseModel::laplace());
  const auto batch = sample(NoiseModel::laplace(), n, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sure_select(batch.values, K, n));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SureSelect)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Dwt(benchmark::State& state) {
  const auto batch = sample(NoiseModel::normal(1.0), 4096, 7);
  for (auto _ : state) {
    auto tf = dwt(batch.values, Wavelet::d4, 6);
    benchmark::DoNotOptimize(tf.scaling[0]);
  }
}
BENCHMARK(BM_Dwt)->Unit(benchmark::kMicrosecond);

void BM_SampleSech(benchmark::State& state) {
  ModelSampler sampler(NoiseModel::sech());
  CounterRng rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw(rng));
  }
}
BENCHMARK(BM_SampleSech);

}  // namespace

BENCHMARK_MAIN();
