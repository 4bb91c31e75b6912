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

#pragma once

/*! \file kstar/harness.hpp
    \brief Validation/test protocol for comparing the estimators.

    A dataset is shuffled and halved. Each method picks its hyperparameter by
    k-fold cross validation on the first half (mean absolute error), then is
    scored on the second half using the whole first half as training data.
    Every random choice derives from one 64-bit seed, and all reductions run
    in a fixed order, so a report is a pure function of (data, spec).
*/

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kstar/baselines.hpp"
#include "kstar/metricspace.hpp"

namespace kstar {

enum class MethodKind { KStar, Knn, NadarayaWatson };

struct Method {
  MethodKind kind = MethodKind::KStar;
  /// Only meaningful for NadarayaWatson.
  KernelVariant kernel = KernelVariant::Gaussian;

  /// "kstar", "knn", "nw-gaussian", "nw-epanechnikov", "nw-triangular".
  std::string name() const;
  /// Accepts the names above; "nw" alone means the Gaussian kernel.
  static std::optional<Method> parse(std::string_view text);

  friend bool operator==(const Method&, const Method&) = default;
};

struct ExperimentSpec {
  MetricKind metric = MetricKind::Euclidean;
  std::uint64_t seed = 0;
  std::size_t folds = 5;
  std::vector<std::size_t> grid_k = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> grid_sigma = {0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1, 5, 10};
  std::vector<double> grid_ratio = {0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1, 5, 10};
  std::vector<Method> methods = {Method{MethodKind::Knn}, Method{MethodKind::NadarayaWatson},
                                 Method{MethodKind::KStar}};
  /// Per-feature min-max scaling fitted on the validation half.
  bool normalize = false;
  std::size_t permutation_resamples = 10000;

  /// Throws std::invalid_argument when folds < 2, a grid is empty or holds a non-positive value.
  void validate() const;
  /// The grid searched for `method`, as reals (k values are converted).
  std::vector<double> grid_for(const Method& method) const;
};

/// Splittable 64-bit mixer; used to derive independent seeds from one.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Shuffled split; the first ceil(n/2) shuffled rows form the validation half.
/// Throws std::invalid_argument when n < 2.
std::pair<LabeledDataset, LabeledDataset> split_half(const LabeledDataset& ds, std::uint64_t seed);

/// Fold id per row: shuffle, then contiguous blocks; the first n % folds
/// folds get one extra row. Throws std::invalid_argument unless 2 <= folds <= n.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed);

/// Min-max scaling fitted on one dataset and applied to others; constant
/// features map to 0.
class MinMaxScaler {
 public:
  explicit MinMaxScaler(const LabeledDataset& fit_on);
  LabeledDataset apply(const LabeledDataset& ds) const;

 private:
  std::vector<double> low_;
  std::vector<double> span_;
};

/// Predictions of `method` for every value of `grid` from one distance profile.
/// A NaN entry marks a grid value that is not applicable (k larger than the training set).
/// For k*-NN, `kstar_out` (when nonempty) receives the neighbor count per grid value.
void predict_grid(const Method& method, const DistanceProfile& profile,
                  std::span<const double> labels, std::span<const double> grid,
                  std::span<double> out, std::span<std::size_t> kstar_out = {});

struct CvResult {
  double best_param = 0.0;
  double best_error = 0.0;
  std::vector<double> grid;
  /// Mean absolute held-out error per grid value; +inf when not applicable.
  std::vector<double> errors;
};

/// Each row is predicted once from the other folds; ties pick the smaller grid value.
CvResult cross_validate(const LabeledDataset& ds, const Method& method,
                        std::span<const double> grid, std::size_t folds, std::uint64_t seed,
                        MetricKind metric = MetricKind::Euclidean);

struct TestEvaluation {
  double mae = 0.0;
  /// Population standard deviation of the absolute errors.
  double std = 0.0;
  std::vector<double> predictions;
  std::vector<double> abs_errors;
  std::optional<std::size_t> kstar_min;
  std::optional<std::size_t> kstar_max;
};

TestEvaluation evaluate_test(const LabeledDataset& train, const LabeledDataset& test,
                             const Method& method, double param,
                             MetricKind metric = MetricKind::Euclidean);

/// Two-sided paired sign-flip permutation test on the differences a_i - b_i.
/// Returns (1 + #{resamples at least as extreme}) / (1 + resamples).
/// Throws std::invalid_argument unless both lists have the same length >= 2.
double significance_test(std::span<const double> errors_a, std::span<const double> errors_b,
                         std::uint64_t seed = 0, std::size_t resamples = 10000);

struct MethodReport {
  Method method;
  double best_param = 0.0;
  double validation_error = 0.0;
  double mae = 0.0;
  double std = 0.0;
  std::optional<std::size_t> kstar_min;
  std::optional<std::size_t> kstar_max;
  /// Against the best method; the best method itself is compared with the runner-up.
  std::optional<double> p_value_vs_best;
  std::vector<double> cv_grid;
  std::vector<double> cv_errors;
  std::vector<double> abs_errors;
};

struct CvReport {
  std::string dataset;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t validation_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  MetricKind metric = MetricKind::Euclidean;
  bool normalized = false;
  std::string best_method;
  std::vector<MethodReport> methods;

  const MethodReport* find(MethodKind kind) const;
};

CvReport run_experiment(const LabeledDataset& ds, const ExperimentSpec& spec,
                        const std::string& dataset_name = "");

struct MethodSummary {
  Method method;
  double mean_mae = 0.0;
  double std_mae = 0.0;
  std::size_t kstar_min = 0;
  std::size_t kstar_max = 0;
  /// Seeds on which this method had the lowest test error.
  std::size_t wins = 0;
};

struct BenchmarkReport {
  std::string dataset;
  std::vector<std::uint64_t> seeds;
  std::vector<CvReport> runs;
  std::vector<MethodSummary> summary;
  /// Fraction of seeds where k*-NN test error <= k-NN test error (both must be run).
  std::optional<double> kstar_not_worse_than_knn;
};

/// run_experiment() for seeds base_seed, base_seed + 1, ..., base_seed + repeats - 1.
BenchmarkReport run_benchmark(const LabeledDataset& ds, const ExperimentSpec& spec,
                              std::size_t repeats, const std::string& dataset_name = "");

/// Worker threads used by the harness: hardware concurrency, capped by KSTAR_THREADS.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. Exceptions are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
/// Same, with an explicit thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads);

}  // namespace kstar
