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

#include "kstar/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace kstar {

namespace {

constexpr double kDiscriminantSlack = 1e-9;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Greedy loop shared by every entry point. `beta_at(j)` returns the j-th
// smallest beta (zero-based); `visit(k, lambda_k)` observes each iterate.
template <class BetaAt, class Visit>
GreedyCutoff run_greedy(std::size_t n, BetaAt&& beta_at, Visit&& visit) {
  if (n == 0) throw std::invalid_argument("solve_kstar: beta must be nonempty");

  // lambda shifts with beta, so the sums run over beta - beta_1. This keeps
  // k + S^2 - kQ free of cancellation when the betas are large and close.
  GreedyCutoff out;
  const double base = beta_at(0);
  double lambda = base + 1.0;
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t k = 0;
  while (k <= n - 1 && lambda > beta_at(k)) {
    const double b = beta_at(k) - base;
    ++k;
    sum += b;
    sumsq += b * b;
    lambda = base + lambda_closed_form(sum, sumsq, k);
    ++out.iterations;
    visit(k, lambda);
  }
  out.kstar = k;
  out.lambda = lambda;
  return out;
}

}  // namespace

double hoeffding_scale(double noise_bound, double delta) {
  if (!positive_finite(noise_bound)) {
    throw std::invalid_argument("noise bound b must be positive and finite");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  return noise_bound * std::sqrt(2.0 * std::log(2.0 / delta));
}

NoiseModel NoiseModel::from_parameters(double lipschitz, double noise_bound, double delta) {
  if (!positive_finite(lipschitz)) {
    throw std::invalid_argument("Lipschitz constant L must be positive and finite");
  }
  const double scale = hoeffding_scale(noise_bound, delta);
  if (!positive_finite(lipschitz / scale)) {
    throw std::invalid_argument("ratio L / C is not finite");
  }
  return NoiseModel(lipschitz, noise_bound, delta, scale);
}

NoiseModel NoiseModel::from_ratio(double ratio, double noise_bound, double delta) {
  if (!positive_finite(ratio)) throw std::invalid_argument("ratio L / C must be positive and finite");
  const double scale = hoeffding_scale(noise_bound, delta);
  return NoiseModel(ratio * scale, noise_bound, delta, scale);
}

void validate_sorted_beta(std::span<const double> beta) {
  if (beta.empty()) throw std::invalid_argument("beta must be nonempty");
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!std::isfinite(beta[i]) || beta[i] < 0.0) {
      throw std::invalid_argument("beta[" + std::to_string(i) + "] must be finite and >= 0");
    }
    if (i > 0 && beta[i] < beta[i - 1]) {
      throw std::invalid_argument("beta must be sorted nondecreasing");
    }
  }
}

BetaVector BetaVector::from_values(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("beta must be nonempty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw std::invalid_argument("beta[" + std::to_string(i) + "] must be finite and >= 0");
    }
  }
  BetaVector out;
  out.order.resize(values.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  out.beta.resize(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) out.beta[j] = values[out.order[j]];
  return out;
}

BetaVector scale_distances(const DistanceProfile& profile, const NoiseModel& noise) {
  const double ratio = noise.ratio();
  BetaVector out;
  out.beta.resize(profile.distances.size());
  std::transform(profile.distances.begin(), profile.distances.end(), out.beta.begin(),
                 [ratio](double d) { return ratio * d; });
  out.order = profile.order;
  return out;
}

double lambda_closed_form(double prefix_sum, double prefix_sumsq, std::size_t k) {
  if (k == 0) throw std::invalid_argument("lambda_closed_form: k must be positive");
  const double kd = static_cast<double>(k);
  double disc = kd + prefix_sum * prefix_sum - kd * prefix_sumsq;
  if (disc < 0.0) {
    if (disc < -kDiscriminantSlack) {
      throw SolverInvariantError("negative discriminant " + std::to_string(disc) +
                                 " at k = " + std::to_string(k));
    }
    disc = 0.0;
  }
  return (prefix_sum + std::sqrt(disc)) / kd;
}

GreedyCutoff solve_kstar(std::span<const double> sorted_beta) {
  return run_greedy(
      sorted_beta.size(), [&](std::size_t j) { return sorted_beta[j]; },
      [](std::size_t, double) {});
}

std::vector<double> lambda_trajectory(std::span<const double> sorted_beta) {
  std::vector<double> out;
  run_greedy(
      sorted_beta.size(), [&](std::size_t j) { return sorted_beta[j]; },
      [&](std::size_t, double lambda) { out.push_back(lambda); });
  return out;
}

std::vector<double> sorted_weights(std::span<const double> sorted_beta, double lambda) {
  std::vector<double> w(sorted_beta.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < sorted_beta.size() && sorted_beta[i] < lambda; ++i) {
    w[i] = lambda - sorted_beta[i];
    total += w[i];
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("weights_from_lambda: no beta_i < lambda");
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> weights_from_lambda(const BetaVector& beta, double lambda) {
  const auto sorted = sorted_weights(beta.beta, lambda);
  std::vector<double> out(sorted.size(), 0.0);
  for (std::size_t j = 0; j < sorted.size(); ++j) out[beta.order[j]] = sorted[j];
  return out;
}

KStarSolution solve(const BetaVector& beta, std::span<const double> labels,
                    const NoiseModel& noise) {
  validate_sorted_beta(beta.beta);
  if (beta.order.size() != beta.beta.size()) {
    throw std::invalid_argument("beta order has wrong length");
  }
  if (!labels.empty() && labels.size() != beta.size()) {
    throw std::invalid_argument("label count does not match beta length");
  }

  const GreedyCutoff cut = solve_kstar(beta.beta);
  KStarSolution out;
  out.weights = weights_from_lambda(beta, cut.lambda);
  out.kstar = cut.kstar;
  out.lambda = cut.lambda;
  out.confidence_scale = noise.confidence_scale();
  out.objective = out.confidence_scale * cut.lambda;
  if (!labels.empty()) {
    // Offsets from one label keep constant-label predictions exact.
    const double ref = labels[beta.order.front()];
    double acc = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) acc += out.weights[i] * (labels[i] - ref);
    out.prediction = ref + acc;
  }
  return out;
}

KStarSolution predict(const LabeledDataset& ds, FeatureView query, const NoiseModel& noise,
                      MetricKind metric) {
  const auto beta = scale_distances(profile(ds, query, metric), noise);
  return solve(beta, ds.labels(), noise);
}

double confidence_bound(const KStarSolution& solution) {
  return solution.confidence_scale * solution.lambda;
}

KStarEstimate estimate(const DistanceProfile& profile, std::span<const double> labels,
                       double ratio) {
  const auto& d = profile.distances;
  const GreedyCutoff cut = run_greedy(
      d.size(), [&](std::size_t j) { return ratio * d[j]; }, [](std::size_t, double) {});

  const double ref = labels[profile.order.front()];
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double b = ratio * d[j];
    if (!(b < cut.lambda)) break;
    const double w = cut.lambda - b;
    num += w * (labels[profile.order[j]] - ref);
    den += w;
  }
  if (!(den > 0.0)) throw SolverInvariantError("estimate: empty support at the optimum");
  return {ref + num / den, cut.kstar, cut.lambda};
}

}  // namespace kstar
