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

#include "kstar/harness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

#include "kstar/report.hpp"
#include "test_support.hpp"

namespace kstar {
namespace {

// Labels equal to the row index make it easy to trace rows through splits.
LabeledDataset indexed_dataset(std::size_t n) {
  std::vector<double> coords(n), labels(n);
  std::iota(coords.begin(), coords.end(), 0.0);
  std::iota(labels.begin(), labels.end(), 0.0);
  return LabeledDataset::from_flat(coords, labels, 1);
}

LabeledDataset noisy_line(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<double> coords(2 * n), labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    coords[2 * i] = unit(rng);
    coords[2 * i + 1] = unit(rng);
    labels[i] = coords[2 * i] + noise(rng);
  }
  return LabeledDataset::from_flat(coords, labels, 2);
}

TEST(Method, NamesAndParsing) {
  EXPECT_EQ(Method{MethodKind::KStar}.name(), "kstar");
  EXPECT_EQ(Method{MethodKind::Knn}.name(), "knn");
  EXPECT_EQ((Method{MethodKind::NadarayaWatson, KernelVariant::Triangular}.name()), "nw-triangular");
  EXPECT_EQ(Method::parse("nw"), (Method{MethodKind::NadarayaWatson, KernelVariant::Gaussian}));
  for (const char* s : {"kstar", "knn", "nw-gaussian", "nw-epanechnikov", "nw-triangular"})
    EXPECT_EQ(Method::parse(s)->name(), s);
  EXPECT_FALSE(Method::parse("svm").has_value());
  EXPECT_FALSE(Method::parse("nw-box").has_value());
}

TEST(ExperimentSpec, Validation) {
  ExperimentSpec spec;
  EXPECT_NO_THROW(spec.validate());
  spec.folds = 1;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = {};
  spec.grid_k = {0, 1};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = {};
  spec.grid_sigma = {};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = {};
  spec.grid_ratio = {1.0, -0.5};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = {};
  spec.methods = {};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Seeds, MixAndPermutation) {
  EXPECT_EQ(mix_seed(1, 2), mix_seed(1, 2));
  EXPECT_NE(mix_seed(1, 2), mix_seed(1, 3));
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 2));

  const auto p = seeded_permutation(50, 9);
  EXPECT_EQ(p, seeded_permutation(50, 9));
  EXPECT_NE(p, seeded_permutation(50, 10));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(SplitHalf, SizesAndCeilingRule) {
  for (std::uint64_t seed : {0u, 1u, 77u}) {
    const auto [v4, t4] = split_half(indexed_dataset(4), seed);
    EXPECT_EQ(v4.size(), 2u);
    EXPECT_EQ(t4.size(), 2u);
    const auto [v5, t5] = split_half(indexed_dataset(5), seed);
    EXPECT_EQ(v5.size(), 3u);
    EXPECT_EQ(t5.size(), 2u);
  }
  EXPECT_THROW(split_half(indexed_dataset(1), 0), std::invalid_argument);
}

TEST(SplitHalf, DeterministicDisjointCover) {
  const auto ds = indexed_dataset(31);
  const auto [v1, t1] = split_half(ds, 5);
  const auto [v2, t2] = split_half(ds, 5);
  EXPECT_TRUE(std::equal(v1.labels().begin(), v1.labels().end(), v2.labels().begin()));
  std::set<double> seen(v1.labels().begin(), v1.labels().end());
  seen.insert(t1.labels().begin(), t1.labels().end());
  EXPECT_EQ(seen.size(), 31u);
  const auto [v3, t3] = split_half(ds, 6);
  EXPECT_FALSE(std::equal(v1.labels().begin(), v1.labels().end(), v3.labels().begin()));
}

TEST(FoldAssignment, DisjointCoverWithBalancedSizes) {
  for (std::size_t n : {5, 12, 13, 50, 101}) {
    for (std::size_t folds : {2, 3, 5}) {
      const auto f = fold_assignment(n, folds, n * 31 + folds);
      ASSERT_EQ(f.size(), n);
      std::vector<std::size_t> count(folds, 0);
      for (auto id : f) {
        ASSERT_LT(id, folds);
        ++count[id];
      }
      for (std::size_t k = 0; k < folds; ++k)
        EXPECT_EQ(count[k], n / folds + (k < n % folds ? 1 : 0)) << n << " " << folds;
      EXPECT_EQ(f, fold_assignment(n, folds, n * 31 + folds));
    }
  }
  EXPECT_THROW(fold_assignment(4, 5, 0), std::invalid_argument);
  EXPECT_THROW(fold_assignment(4, 1, 0), std::invalid_argument);
}

TEST(MinMaxScaler, FitsOnOneAppliesToOther) {
  const LabeledDataset fit({{0.0, 5.0}, {10.0, 5.0}}, {1.0, 2.0});
  const LabeledDataset other({{5.0, 7.0}, {20.0, 5.0}}, {3.0, 4.0});
  const MinMaxScaler scaler(fit);
  const auto s = scaler.apply(other);
  EXPECT_DOUBLE_EQ(s.point(0)[0], 0.5);
  EXPECT_DOUBLE_EQ(s.point(1)[0], 2.0);
  EXPECT_DOUBLE_EQ(s.point(0)[1], 0.0);  // constant feature
  EXPECT_EQ(s.label(1), 4.0);
}

TEST(PredictGrid, MarksInapplicableK) {
  const LabeledDataset ds({{0.0}, {1.0}}, {1.0, 3.0});
  const std::vector<double> q{0.2};
  const auto prof = profile(ds, q, MetricKind::Euclidean);
  const std::vector<double> grid{1, 2, 3};
  std::vector<double> out(3);
  predict_grid(Method{MethodKind::Knn}, prof, ds.labels(), grid, out);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[1], 2.0);
  EXPECT_TRUE(std::isnan(out[2]));
}

TEST(CrossValidate, ConstantLabelsTieToSmallestValue) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({double(i), double(i % 3)});
  const LabeledDataset ds(pts, std::vector<double>(20, 2.5));
  const std::vector<double> real_grid{5, 0.5, 1, 0.01};
  const std::vector<double> k_grid{4, 2, 3};
  for (const char* m : {"kstar", "knn", "nw-gaussian", "nw-triangular"}) {
    const auto method = *Method::parse(m);
    const auto& grid = method.kind == MethodKind::Knn ? k_grid : real_grid;
    const auto r = cross_validate(ds, method, grid, 5, 3);
    EXPECT_EQ(r.best_param, *std::min_element(grid.begin(), grid.end())) << m;
    EXPECT_EQ(r.best_error, 0.0) << m;
    for (double e : r.errors) EXPECT_EQ(e, 0.0) << m;
  }
}

TEST(CrossValidate, SingleValueGrid) {
  const auto ds = noisy_line(30, 1);
  const std::vector<double> grid{3};
  const auto r = cross_validate(ds, Method{MethodKind::Knn}, grid, 5, 8);
  EXPECT_EQ(r.best_param, 3.0);
  EXPECT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.best_error, r.errors[0]);
}

TEST(CrossValidate, DuplicatedPointsGiveGlobalMeanUnderKstar) {
  const std::vector<double> y{0, 1, 1, 0, 1, 1, 0, 0, 1, 1};
  const LabeledDataset ds(std::vector<std::vector<double>>(10, {0.5, 0.5}), y);
  const std::vector<double> grid{0.001, 1, 10};
  const auto r = cross_validate(ds, Method{MethodKind::KStar}, grid, 5, 42);
  const auto folds = fold_assignment(10, 5, 42);
  double expected = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < 10; ++j)
      if (folds[j] != folds[i]) sum += y[j], ++count;
    expected += std::abs(sum / count - y[i]) / 10.0;
  }
  for (double e : r.errors) EXPECT_NEAR(e, expected, 1e-12);
  EXPECT_EQ(r.best_param, 0.001);
}

TEST(CrossValidate, OversizedKScoresInfinity) {
  const auto ds = noisy_line(10, 2);
  const std::vector<double> grid{1, 9};  // training folds hold 8 rows
  const auto r = cross_validate(ds, Method{MethodKind::Knn}, grid, 5, 0);
  EXPECT_TRUE(std::isinf(r.errors[1]));
  EXPECT_EQ(r.best_param, 1.0);
  const std::vector<double> only_big{9};
  EXPECT_THROW(cross_validate(ds, Method{MethodKind::Knn}, only_big, 5, 0),
               std::invalid_argument);
}

TEST(EvaluateTest, ConstantDataIsPerfect) {
  const LabeledDataset train({{0.0}, {1.0}, {2.0}}, {4.0, 4.0, 4.0});
  const LabeledDataset test({{0.5}, {3.0}}, {4.0, 4.0});
  for (const char* m : {"kstar", "knn", "nw-epanechnikov"}) {
    const auto e = evaluate_test(train, test, *Method::parse(m), 1.0);
    EXPECT_EQ(e.mae, 0.0) << m;
    EXPECT_EQ(e.std, 0.0) << m;
  }
}

TEST(EvaluateTest, DuplicateGeometryAndKstarRange) {
  const LabeledDataset train({{1.0}, {1.0}, {1.0}, {9.0}}, {0.0, 1.0, 1.0, 5.0});
  const LabeledDataset test({{1.0}}, {0.0});
  // With a tiny ratio every point is used nearly uniformly; with a huge one only the duplicates.
  const auto e = evaluate_test(train, test, Method{MethodKind::KStar}, 100.0);
  EXPECT_NEAR(e.predictions[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(e.mae, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(e.kstar_min, 3u);
  EXPECT_EQ(e.kstar_max, 3u);
  const auto knn = evaluate_test(train, test, Method{MethodKind::Knn}, 2.0);
  EXPECT_FALSE(knn.kstar_min.has_value());
}

TEST(EvaluateTest, MaeAndPopulationStd) {
  const LabeledDataset train({{0.0}}, {0.0});
  const LabeledDataset test({{0.0}, {1.0}, {2.0}, {3.0}}, {1.0, -1.0, 3.0, -3.0});
  const auto e = evaluate_test(train, test, Method{MethodKind::Knn}, 1.0);
  EXPECT_DOUBLE_EQ(e.mae, 2.0);
  EXPECT_DOUBLE_EQ(e.std, 1.0);
  EXPECT_EQ(e.abs_errors, (std::vector<double>{1, 1, 3, 3}));
}

TEST(EvaluateTest, NoLeakageFromTestLabels) {
  const auto ds = noisy_line(60, 3);
  const auto [train, test] = split_half(ds, 11);
  std::vector<double> scrambled(test.labels().begin(), test.labels().end());
  for (auto& y : scrambled) y = 1000.0 - 7.0 * y;
  const auto mutated = test.with_labels(scrambled);
  for (const char* m : {"kstar", "knn", "nw-gaussian"}) {
    const auto method = *Method::parse(m);
    const double param = method.kind == MethodKind::Knn ? 3.0 : 0.5;
    const auto a = evaluate_test(train, test, method, param);
    const auto b = evaluate_test(train, mutated, method, param);
    EXPECT_EQ(a.predictions, b.predictions) << m;
  }
}

TEST(SignificanceTest, Examples) {
  const std::vector<double> a{0.1, 0.2, 0.3, 0.4};
  EXPECT_DOUBLE_EQ(significance_test(a, a), 1.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> b(100), c(100);
  for (std::size_t i = 0; i < 100; ++i) {
    b[i] = unit(rng);
    c[i] = b[i] + 0.05;
  }
  EXPECT_LT(significance_test(b, c), 0.01);
  EXPECT_LT(significance_test(c, b), 0.01);
  EXPECT_EQ(significance_test(b, c, 3), significance_test(b, c, 3));

  const std::vector<double> one{1.0}, two{1.0, 2.0};
  EXPECT_THROW(significance_test(one, one), std::invalid_argument);
  EXPECT_THROW(significance_test(a, two), std::invalid_argument);
}

TEST(SignificanceTest, PValueInUnitInterval) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(30), b(30);
    for (auto& v : a) v = std::abs(normal(rng));
    for (auto& v : b) v = std::abs(normal(rng));
    const double p = significance_test(a, b, t, 999);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  for (std::size_t threads : {1, 2, 4, 8}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, threads);
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(
                     100,
                     [](std::size_t i) {
                       if (i == 37) throw std::runtime_error("boom");
                     },
                     threads),
                 std::runtime_error);
  }
  parallel_for(0, [](std::size_t) { FAIL(); }, 4);
}

TEST(WorkerCount, RespectsEnvironmentCap) {
  ::setenv("KSTAR_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1u);
  ::setenv("KSTAR_THREADS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  ::unsetenv("KSTAR_THREADS");
  EXPECT_GE(worker_count(), 1u);
}

TEST(RunExperiment, ReportShapeAndDeterminism) {
  const auto ds = noisy_line(80, 4);
  ExperimentSpec spec;
  spec.seed = 2024;
  spec.permutation_resamples = 500;
  const auto a = run_experiment(ds, spec, "line");
  const auto b = run_experiment(ds, spec, "line");
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(a.validation_size, 40u);
  EXPECT_EQ(a.test_size, 40u);
  ASSERT_EQ(a.methods.size(), 3u);

  const auto* ks = a.find(MethodKind::KStar);
  ASSERT_NE(ks, nullptr);
  ASSERT_TRUE(ks->kstar_min && ks->kstar_max);
  EXPECT_GE(*ks->kstar_min, 1u);
  EXPECT_LE(*ks->kstar_max, a.validation_size);
  for (const auto& m : a.methods) {
    EXPECT_GE(m.mae, 0.0);
    ASSERT_TRUE(m.p_value_vs_best.has_value());
    EXPECT_GT(*m.p_value_vs_best, 0.0);
    EXPECT_LE(*m.p_value_vs_best, 1.0);
  }
  // The line is learnable: every method should beat predicting zero by a wide margin.
  for (const auto& m : a.methods) EXPECT_LT(m.mae, 0.25) << m.method.name();

  spec.seed = 2025;
  EXPECT_NE(to_json(run_experiment(ds, spec, "line")), to_json(a));
}

TEST(RunExperiment, ThreadCapDoesNotChangeResults) {
  const auto ds = noisy_line(60, 5);
  ExperimentSpec spec;
  spec.permutation_resamples = 200;
  ::setenv("KSTAR_THREADS", "1", 1);
  const auto one = to_json(run_experiment(ds, spec));
  ::unsetenv("KSTAR_THREADS");
  const auto many = to_json(run_experiment(ds, spec));
  EXPECT_EQ(one, many);
}

TEST(RunExperiment, TooSmallForFolds) {
  ExperimentSpec spec;
  EXPECT_THROW(run_experiment(noisy_line(8, 6), spec), std::invalid_argument);
}

TEST(RunExperiment, ConstantLabelsGiveZeroError) {
  std::mt19937_64 rng(7);
  auto ds = testing::random_dataset(rng, 40, 3);
  ds = ds.with_labels(std::vector<double>(40, 1.0));
  ExperimentSpec spec;
  spec.permutation_resamples = 100;
  const auto r = run_experiment(ds, spec);
  for (const auto& m : r.methods) EXPECT_EQ(m.mae, 0.0) << m.method.name();
}

TEST(RunBenchmark, SeedsAndSummary) {
  const auto ds = noisy_line(40, 8);
  ExperimentSpec spec;
  spec.seed = 10;
  spec.permutation_resamples = 100;
  const auto r = run_benchmark(ds, spec, 3, "line");
  EXPECT_EQ(r.seeds, (std::vector<std::uint64_t>{10, 11, 12}));
  ASSERT_EQ(r.runs.size(), 3u);
  ASSERT_EQ(r.summary.size(), 3u);
  ASSERT_TRUE(r.kstar_not_worse_than_knn.has_value());
  EXPECT_GE(*r.kstar_not_worse_than_knn, 0.0);
  EXPECT_LE(*r.kstar_not_worse_than_knn, 1.0);
  std::size_t wins = 0;
  for (std::size_t m = 0; m < r.summary.size(); ++m) {
    wins += r.summary[m].wins;
    double mean = 0.0;
    for (const auto& run : r.runs) mean += run.methods[m].mae / 3.0;
    EXPECT_NEAR(r.summary[m].mean_mae, mean, 1e-12);
  }
  EXPECT_GE(wins, 3u);
  EXPECT_EQ(to_json(r), to_json(run_benchmark(ds, spec, 3, "line")));
}

}  // namespace
}  // namespace kstar
