/*
 * Copyright (c) 2026, The kstarnn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "kstar/harness.hpp"

namespace {

kstar::LabeledDataset noisy_sine(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> coords(n * d);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      coords[i * d + c] = unit(rng);
      s += coords[i * d + c];
    }
    labels[i] = std::sin(3.0 * s) + 0.2 * (unit(rng) - 0.5);
  }
  return kstar::LabeledDataset::from_flat(std::move(coords), std::move(labels), d);
}

void BM_CrossValidate(benchmark::State& state) {
  const auto ds = noisy_sine(static_cast<std::size_t>(state.range(0)), 9, 3);
  const kstar::ExperimentSpec spec;
  const auto method = kstar::Method{static_cast<kstar::MethodKind>(state.range(1))};
  const auto grid = spec.grid_for(method);
  for (auto _ : state) {
    auto cv = kstar::cross_validate(ds, method, grid, 5, 11);
    benchmark::DoNotOptimize(cv.best_error);
  }
}
BENCHMARK(BM_CrossValidate)
    ->ArgsProduct({{100, 1000}, {0, 1, 2}})
    ->ArgNames({"n", "method"})
    ->Unit(benchmark::kMillisecond);

void BM_RunExperiment(benchmark::State& state) {
  const auto ds = noisy_sine(static_cast<std::size_t>(state.range(0)), 9, 5);
  kstar::ExperimentSpec spec;
  spec.permutation_resamples = 1000;
  for (auto _ : state) {
    auto report = kstar::run_experiment(ds, spec);
    benchmark::DoNotOptimize(report.methods.data());
  }
}
BENCHMARK(BM_RunExperiment)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
