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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "kstar/solver.hpp"

namespace kstar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Unbiased draw in [0, bound) from a 64-bit engine. Unlike
// std::uniform_int_distribution the sequence is identical on every standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

double mean_of(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double population_std(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

std::string Method::name() const {
  switch (kind) {
    case MethodKind::KStar: return "kstar";
    case MethodKind::Knn: return "knn";
    case MethodKind::NadarayaWatson: return "nw-" + std::string(to_string(kernel));
  }
  return "unknown";
}

std::optional<Method> Method::parse(std::string_view text) {
  if (text == "kstar") return Method{MethodKind::KStar};
  if (text == "knn") return Method{MethodKind::Knn};
  if (text == "nw") return Method{MethodKind::NadarayaWatson, KernelVariant::Gaussian};
  if (text.starts_with("nw-")) {
    if (auto k = parse_kernel(text.substr(3))) return Method{MethodKind::NadarayaWatson, *k};
  }
  return std::nullopt;
}

void ExperimentSpec::validate() const {
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (methods.empty()) throw std::invalid_argument("at least one method is required");
  if (grid_k.empty() || grid_sigma.empty() || grid_ratio.empty()) {
    throw std::invalid_argument("hyperparameter grids must be nonempty");
  }
  for (auto k : grid_k) {
    if (k < 1) throw std::invalid_argument("grid values of k must be >= 1");
  }
  for (const auto* grid : {&grid_sigma, &grid_ratio}) {
    for (double v : *grid) {
      if (!(std::isfinite(v) && v > 0.0)) {
        throw std::invalid_argument("grid values of sigma and L/C must be positive");
      }
    }
  }
  if (permutation_resamples < 1) throw std::invalid_argument("permutation_resamples must be >= 1");
}

std::vector<double> ExperimentSpec::grid_for(const Method& method) const {
  switch (method.kind) {
    case MethodKind::Knn: return {grid_k.begin(), grid_k.end()};
    case MethodKind::NadarayaWatson: return grid_sigma;
    case MethodKind::KStar: return grid_ratio;
  }
  return {};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::pair<LabeledDataset, LabeledDataset> split_half(const LabeledDataset& ds, std::uint64_t seed) {
  const std::size_t n = ds.size();
  if (n < 2) throw std::invalid_argument("split_half: need at least 2 rows");
  const auto perm = seeded_permutation(n, seed);
  const std::size_t half = (n + 1) / 2;
  const std::span<const std::size_t> all(perm);
  return {ds.subset(all.first(half)), ds.subset(all.subspan(half))};
}

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (folds > n) {
    throw std::invalid_argument("dataset too small for " + std::to_string(folds) +
                                " folds (" + std::to_string(n) + " rows)");
  }
  const auto perm = seeded_permutation(n, seed);
  const std::size_t base = n / folds;
  const std::size_t extra = n % folds;

  std::vector<std::size_t> fold_of(n);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    for (std::size_t j = 0; j < len; ++j) fold_of[perm[pos++]] = f;
  }
  return fold_of;
}

MinMaxScaler::MinMaxScaler(const LabeledDataset& fit_on)
    : low_(fit_on.dim(), kInf), span_(fit_on.dim(), 0.0) {
  std::vector<double> high(fit_on.dim(), -kInf);
  for (std::size_t i = 0; i < fit_on.size(); ++i) {
    const auto row = fit_on.point(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      low_[c] = std::min(low_[c], row[c]);
      high[c] = std::max(high[c], row[c]);
    }
  }
  for (std::size_t c = 0; c < span_.size(); ++c) span_[c] = high[c] - low_[c];
}

LabeledDataset MinMaxScaler::apply(const LabeledDataset& ds) const {
  if (ds.dim() != low_.size()) throw std::invalid_argument("scaler dimension mismatch");
  std::vector<double> coords(ds.coords().begin(), ds.coords().end());
  const std::size_t d = ds.dim();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const std::size_t c = i % d;
    coords[i] = span_[c] > 0.0 ? (coords[i] - low_[c]) / span_[c] : 0.0;
  }
  std::vector<double> labels(ds.labels().begin(), ds.labels().end());
  return LabeledDataset::from_flat(std::move(coords), std::move(labels), d);
}

void predict_grid(const Method& method, const DistanceProfile& profile,
                  std::span<const double> labels, std::span<const double> grid,
                  std::span<double> out, std::span<std::size_t> kstar_out) {
  if (out.size() != grid.size()) throw std::invalid_argument("predict_grid: output size mismatch");
  switch (method.kind) {
    case MethodKind::KStar:
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto est = estimate(profile, labels, grid[g]);
        out[g] = est.prediction;
        if (!kstar_out.empty()) kstar_out[g] = est.kstar;
      }
      break;
    case MethodKind::Knn:
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double k = grid[g];
        const bool usable = k >= 1.0 && k <= static_cast<double>(profile.size()) && k == std::floor(k);
        out[g] = usable ? knn_from_profile(profile, labels, static_cast<std::size_t>(k)) : kNaN;
      }
      break;
    case MethodKind::NadarayaWatson:
      for (std::size_t g = 0; g < grid.size(); ++g) {
        out[g] = nw_from_profile(profile, labels, Kernel(method.kernel, grid[g]));
      }
      break;
  }
}

CvResult cross_validate(const LabeledDataset& ds, const Method& method,
                        std::span<const double> grid, std::size_t folds, std::uint64_t seed,
                        MetricKind metric) {
  if (grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
  const std::size_t n = ds.size();
  const auto fold_of = fold_assignment(n, folds, seed);

  std::vector<LabeledDataset> train;
  train.reserve(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) idx.push_back(i);
    }
    if (idx.empty()) throw std::invalid_argument("cross_validate: fold with empty training set");
    train.push_back(ds.subset(idx));
  }

  const std::size_t g_count = grid.size();
  std::vector<double> abs_err(n * g_count);
  parallel_for(n, [&](std::size_t i) {
    const auto& tr = train[fold_of[i]];
    const auto prof = profile(tr, ds.point(i), metric);
    std::span<double> row(abs_err.data() + i * g_count, g_count);
    predict_grid(method, prof, tr.labels(), grid, row);
    for (double& v : row) v = std::abs(v - ds.label(i));
  });

  CvResult out;
  out.grid.assign(grid.begin(), grid.end());
  out.errors.assign(g_count, 0.0);
  for (std::size_t g = 0; g < g_count; ++g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = abs_err[i * g_count + g];
      if (std::isnan(e)) {
        acc = kInf;
        break;
      }
      acc += e;
    }
    out.errors[g] = std::isinf(acc) ? kInf : acc / static_cast<double>(n);
  }

  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < g_count; ++g) {
    if (!std::isfinite(out.errors[g])) continue;
    if (!best || out.errors[g] < out.errors[*best] ||
        (out.errors[g] == out.errors[*best] && grid[g] < grid[*best])) {
      best = g;
    }
  }
  if (!best) {
    throw std::invalid_argument("cross_validate: no grid value is applicable to " +
                                method.name() + " at this dataset size");
  }
  out.best_param = grid[*best];
  out.best_error = out.errors[*best];
  return out;
}

TestEvaluation evaluate_test(const LabeledDataset& train, const LabeledDataset& test,
                             const Method& method, double param, MetricKind metric) {
  if (train.dim() != test.dim()) throw std::invalid_argument("evaluate_test: dimension mismatch");
  if (method.kind == MethodKind::Knn &&
      !(param >= 1.0 && param <= static_cast<double>(train.size()) && param == std::floor(param))) {
    throw std::out_of_range("evaluate_test: k outside [1, training size]");
  }

  const std::size_t m = test.size();
  TestEvaluation out;
  out.predictions.resize(m);
  out.abs_errors.resize(m);
  std::vector<std::size_t> kstar(m, 0);
  const double grid[1] = {param};

  parallel_for(m, [&](std::size_t i) {
    const auto prof = profile(train, test.point(i), metric);
    predict_grid(method, prof, train.labels(), grid, std::span<double>(&out.predictions[i], 1),
                 std::span<std::size_t>(&kstar[i], 1));
    out.abs_errors[i] = std::abs(out.predictions[i] - test.label(i));
  });

  out.mae = mean_of(out.abs_errors);
  out.std = population_std(out.abs_errors, out.mae);
  if (method.kind == MethodKind::KStar) {
    const auto [lo, hi] = std::minmax_element(kstar.begin(), kstar.end());
    out.kstar_min = *lo;
    out.kstar_max = *hi;
  }
  return out;
}

double significance_test(std::span<const double> errors_a, std::span<const double> errors_b,
                         std::uint64_t seed, std::size_t resamples) {
  if (errors_a.size() != errors_b.size()) {
    throw std::invalid_argument("significance_test: error lists differ in length");
  }
  if (errors_a.size() < 2) throw std::invalid_argument("significance_test: need at least 2 pairs");
  if (resamples == 0) throw std::invalid_argument("significance_test: resamples must be >= 1");

  const std::size_t n = errors_a.size();
  std::vector<double> diff(n);
  double observed = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = errors_a[i] - errors_b[i];
    observed += diff[i];
    scale += std::abs(diff[i]);
  }
  observed = std::abs(observed);
  // Sums of identical magnitudes in a different order must still count as ties.
  const double threshold = observed - 1e-12 * scale;

  std::mt19937_64 rng(seed);
  std::size_t extreme = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    double acc = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      acc += (bits & 1U) ? diff[i] : -diff[i];
      bits >>= 1U;
    }
    if (std::abs(acc) >= threshold) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(resamples + 1);
}

const MethodReport* CvReport::find(MethodKind kind) const {
  for (const auto& m : methods) {
    if (m.method.kind == kind) return &m;
  }
  return nullptr;
}

CvReport run_experiment(const LabeledDataset& ds, const ExperimentSpec& spec,
                        const std::string& dataset_name) {
  spec.validate();
  auto [validation, test] = split_half(ds, spec.seed);
  if (validation.size() < spec.folds) {
    throw std::invalid_argument("dataset too small: validation half has " +
                                std::to_string(validation.size()) + " rows for " +
                                std::to_string(spec.folds) + " folds");
  }
  if (spec.normalize) {
    const MinMaxScaler scaler(validation);
    validation = scaler.apply(validation);
    test = scaler.apply(test);
  }

  CvReport report;
  report.dataset = dataset_name;
  report.n = ds.size();
  report.dim = ds.dim();
  report.validation_size = validation.size();
  report.test_size = test.size();
  report.seed = spec.seed;
  report.folds = spec.folds;
  report.metric = spec.metric;
  report.normalized = spec.normalize;

  const std::uint64_t cv_seed = mix_seed(spec.seed, 1);
  for (const auto& method : spec.methods) {
    const auto grid = spec.grid_for(method);
    const auto cv = cross_validate(validation, method, grid, spec.folds, cv_seed, spec.metric);
    auto eval = evaluate_test(validation, test, method, cv.best_param, spec.metric);

    MethodReport mr;
    mr.method = method;
    mr.best_param = cv.best_param;
    mr.validation_error = cv.best_error;
    mr.mae = eval.mae;
    mr.std = eval.std;
    mr.kstar_min = eval.kstar_min;
    mr.kstar_max = eval.kstar_max;
    mr.cv_grid = cv.grid;
    mr.cv_errors = cv.errors;
    mr.abs_errors = std::move(eval.abs_errors);
    report.methods.push_back(std::move(mr));
  }

  // Rank by test error; ties keep the configured method order.
  std::vector<std::size_t> rank(report.methods.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    return report.methods[a].mae < report.methods[b].mae;
  });
  const std::size_t best = rank.front();
  report.best_method = report.methods[best].method.name();

  if (report.test_size >= 2 && report.methods.size() >= 2) {
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
      const std::size_t other = (i == best) ? rank[1] : best;
      report.methods[i].p_value_vs_best =
          significance_test(report.methods[i].abs_errors, report.methods[other].abs_errors,
                            mix_seed(spec.seed, 2 + i), spec.permutation_resamples);
    }
  }
  return report;
}

BenchmarkReport run_benchmark(const LabeledDataset& ds, const ExperimentSpec& spec,
                              std::size_t repeats, const std::string& dataset_name) {
  if (repeats == 0) throw std::invalid_argument("run_benchmark: repeats must be >= 1");
  BenchmarkReport out;
  out.dataset = dataset_name;
  for (std::size_t r = 0; r < repeats; ++r) {
    ExperimentSpec run_spec = spec;
    run_spec.seed = spec.seed + r;
    out.seeds.push_back(run_spec.seed);
    out.runs.push_back(run_experiment(ds, run_spec, dataset_name));
  }

  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    MethodSummary s;
    s.method = spec.methods[mi];
    std::vector<double> maes;
    s.kstar_min = std::numeric_limits<std::size_t>::max();
    for (const auto& run : out.runs) {
      const auto& m = run.methods[mi];
      maes.push_back(m.mae);
      if (m.kstar_min) s.kstar_min = std::min(s.kstar_min, *m.kstar_min);
      if (m.kstar_max) s.kstar_max = std::max(s.kstar_max, *m.kstar_max);
      if (run.best_method == m.method.name()) ++s.wins;
    }
    if (s.method.kind != MethodKind::KStar) s.kstar_min = 0;
    s.mean_mae = mean_of(maes);
    s.std_mae = population_std(maes, s.mean_mae);
    out.summary.push_back(s);
  }

  std::size_t not_worse = 0;
  bool both = true;
  for (const auto& run : out.runs) {
    const auto* ks = run.find(MethodKind::KStar);
    const auto* kn = run.find(MethodKind::Knn);
    if (!ks || !kn) {
      both = false;
      break;
    }
    if (ks->mae <= kn->mae) ++not_worse;
  }
  if (both) {
    out.kstar_not_worse_than_knn = static_cast<double>(not_worse) / static_cast<double>(repeats);
  }
  return out;
}

std::size_t worker_count() {
  std::size_t n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KSTAR_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  parallel_for(n, body, worker_count());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace kstar
