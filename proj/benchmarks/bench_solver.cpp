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

#include "kstar/metricspace.hpp"
#include "kstar/oracle.hpp"
#include "kstar/solver.hpp"

namespace {

// Evenly spaced beta_i = c * (i - 1) with c = sqrt(3 / k^3) stops near k.
std::vector<double> spaced_beta(std::size_t n, std::size_t target_kstar) {
  const double k = static_cast<double>(target_kstar);
  const double step = std::sqrt(3.0 / (k * k * k));
  std::vector<double> beta(n);
  for (std::size_t i = 0; i < n; ++i) beta[i] = step * static_cast<double>(i);
  return beta;
}

void BM_SolveKstarPresorted(benchmark::State& state) {
  const auto beta = spaced_beta(1'000'000, static_cast<std::size_t>(state.range(0)));
  std::size_t kstar = 0;
  for (auto _ : state) {
    const auto cut = kstar::solve_kstar(beta);
    kstar = cut.kstar;
    benchmark::DoNotOptimize(cut);
  }
  state.counters["kstar"] = static_cast<double>(kstar);
  state.SetComplexityN(static_cast<int64_t>(kstar));
}
BENCHMARK(BM_SolveKstarPresorted)->RangeMultiplier(10)->Range(10, 100000)->Complexity(benchmark::oN);

void BM_SolveWithWeights(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  auto values = spaced_beta(n, 1000);
  const auto beta = kstar::BetaVector::from_values(values);
  const auto noise = kstar::NoiseModel::from_ratio(1.0);
  for (auto _ : state) {
    auto sol = kstar::solve(beta, {}, noise);
    benchmark::DoNotOptimize(sol.lambda);
  }
}
BENCHMARK(BM_SolveWithWeights)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_Profile(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> coords(n * d);
  for (auto& v : coords) v = normal(rng);
  const auto ds = kstar::LabeledDataset::from_flat(std::move(coords), std::vector<double>(n, 0.0), d);
  std::vector<double> query(d, 0.1);
  for (auto _ : state) {
    auto prof = kstar::profile(ds, query, kstar::MetricKind::Euclidean);
    benchmark::DoNotOptimize(prof.distances.data());
  }
}
BENCHMARK(BM_Profile)->Args({1000, 10})->Args({100000, 10})->Unit(benchmark::kMicrosecond);

void BM_GreedyVsEnumeration(benchmark::State& state) {
  const bool greedy = state.range(1) == 1;
  const auto beta = spaced_beta(static_cast<std::size_t>(state.range(0)), 50);
  for (auto _ : state) {
    if (greedy) {
      benchmark::DoNotOptimize(kstar::solve_kstar(beta));
    } else {
      benchmark::DoNotOptimize(kstar::oracle::solve_by_enumeration(beta));
    }
  }
}
BENCHMARK(BM_GreedyVsEnumeration)->ArgsProduct({{100, 1000}, {0, 1}});

}  // namespace
