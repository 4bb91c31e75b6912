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

/*! \file kstar/solver.hpp
    \brief Exact locally optimal weights for nearest-neighbor estimation.

    For a query x0 with sorted neighbor distances d_1 <= ... <= d_n the
    estimator minimizes, over the probability simplex,

        C * ||alpha||_2 + L * sum_i alpha_i d_i

    where L bounds the Lipschitz constant of the regression function and
    C = b * sqrt(2 ln(2 / delta)) turns the label-noise bound b into a
    (1 - delta) Hoeffding bound on the weighted noise. Dividing by C leaves a
    problem in beta_i = (L / C) d_i only. Its minimizer puts weight
    proportional to (lambda - beta_i) on every point with beta_i < lambda and
    the optimal value is lambda, so C * lambda is the confidence half-width.

    solve_kstar() finds lambda by adding neighbors in distance order while
    the running multiplier still exceeds the next beta. Each step updates
    the prefix sums of beta and beta^2 in O(1), so the loop costs O(k*).
*/

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "kstar/metricspace.hpp"

namespace kstar {

inline constexpr double kDefaultDelta = 0.05;
inline constexpr double kDefaultNoiseBound = 1.0;

/// Raised when floating-point state contradicts a property the algorithm
/// guarantees for valid input (e.g. a clearly negative discriminant).
class SolverInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Lipschitz constant L, noise bound b and failure probability delta.
class NoiseModel {
 public:
  static NoiseModel from_parameters(double lipschitz, double noise_bound, double delta);
  /// L / C given directly; b and delta only set the scale C of the bound.
  static NoiseModel from_ratio(double ratio, double noise_bound = kDefaultNoiseBound,
                               double delta = kDefaultDelta);

  double lipschitz() const noexcept { return lipschitz_; }
  double noise_bound() const noexcept { return noise_bound_; }
  double delta() const noexcept { return delta_; }
  /// C = b * sqrt(2 ln(2 / delta)).
  double confidence_scale() const noexcept { return scale_; }
  /// L / C, the only quantity the optimal weights depend on.
  double ratio() const noexcept { return lipschitz_ / scale_; }

 private:
  NoiseModel(double lipschitz, double noise_bound, double delta, double scale)
      : lipschitz_(lipschitz), noise_bound_(noise_bound), delta_(delta), scale_(scale) {}

  double lipschitz_;
  double noise_bound_;
  double delta_;
  double scale_;
};

/// b * sqrt(2 ln(2 / delta)); throws std::invalid_argument on b <= 0 or delta outside (0, 1).
double hoeffding_scale(double noise_bound, double delta);

/// Sorted scaled distances and the permutation back to dataset indices.
struct BetaVector {
  std::vector<double> beta;
  std::vector<std::size_t> order;

  std::size_t size() const noexcept { return beta.size(); }

  /// Stable-sorts arbitrary nonnegative finite values; `order` maps back to input positions.
  static BetaVector from_values(std::span<const double> values);
};

/// Throws std::invalid_argument unless `beta` is nonempty, finite, nonnegative and nondecreasing.
void validate_sorted_beta(std::span<const double> beta);

BetaVector scale_distances(const DistanceProfile& profile, const NoiseModel& noise);

/// lambda_k = (S + sqrt(k + S^2 - k Q)) / k for prefix sums S = sum beta, Q = sum beta^2.
/// Discriminants in [-1e-9, 0) are clamped to zero; anything lower throws SolverInvariantError.
double lambda_closed_form(double prefix_sum, double prefix_sumsq, std::size_t k);

struct GreedyCutoff {
  std::size_t kstar = 0;
  double lambda = 0.0;
  /// Number of loop iterations executed; equals kstar.
  std::size_t iterations = 0;
};

/// Greedy cutoff search over sorted beta. Throws std::invalid_argument on empty input.
GreedyCutoff solve_kstar(std::span<const double> sorted_beta);

/// The multipliers lambda_1, ..., lambda_{k*} visited by solve_kstar().
std::vector<double> lambda_trajectory(std::span<const double> sorted_beta);

/// Weights (lambda - beta_i)_+ normalized to the simplex, in sorted order.
std::vector<double> sorted_weights(std::span<const double> sorted_beta, double lambda);

/// Same as sorted_weights() but scattered back to original indices via `beta.order`.
/// Throws std::invalid_argument if no beta_i < lambda.
std::vector<double> weights_from_lambda(const BetaVector& beta, double lambda);

struct KStarSolution {
  /// Indexed like the dataset (or like the input beta values).
  std::vector<double> weights;
  std::size_t kstar = 0;
  double lambda = 0.0;
  /// C * lambda: value of the bias + variance surrogate at the optimum.
  double objective = 0.0;
  /// sum_i weights_i * y_i; zero when no labels were supplied.
  double prediction = 0.0;
  double confidence_scale = 0.0;
};

/// Solves for precomputed beta; `labels` may be empty or indexed like the original input.
KStarSolution solve(const BetaVector& beta, std::span<const double> labels,
                    const NoiseModel& noise);

KStarSolution predict(const LabeledDataset& ds, FeatureView query, const NoiseModel& noise,
                      MetricKind metric = MetricKind::Euclidean);

/// With probability at least 1 - delta, |prediction - f(x0)| <= C * lambda.
double confidence_bound(const KStarSolution& solution);

/// Prediction-only fast path used by the cross-validation loops: reads only the
/// first k* + 1 entries of the profile and never materializes the weight vector.
struct KStarEstimate {
  double prediction = 0.0;
  std::size_t kstar = 0;
  double lambda = 0.0;
};

KStarEstimate estimate(const DistanceProfile& profile, std::span<const double> labels,
                       double ratio);

}  // namespace kstar
