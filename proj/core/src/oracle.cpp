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

#include "kstar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace kstar::oracle {

std::string_view to_string(Method method) {
  return method == Method::Enumeration ? "enumeration" : "gradient";
}

double surrogate_objective(std::span<const double> alpha, std::span<const double> beta) {
  if (alpha.size() != beta.size()) throw std::invalid_argument("surrogate_objective: size mismatch");
  double sq = 0.0;
  double lin = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    sq += alpha[i] * alpha[i];
    lin += alpha[i] * beta[i];
  }
  return std::sqrt(sq) + lin;
}

OracleResult solve_by_enumeration(std::span<const double> sorted_beta) {
  const std::size_t n = sorted_beta.size();
  if (n == 0) throw std::invalid_argument("solve_by_enumeration: beta must be nonempty");

  OracleResult best;
  best.method = Method::Enumeration;
  double best_lambda = std::numeric_limits<double>::infinity();

  for (std::size_t k = 1; k <= n; ++k) {
    // Recomputed from scratch for every k.
    double s = 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      s += sorted_beta[i];
      q += sorted_beta[i] * sorted_beta[i];
    }
    const double kd = static_cast<double>(k);
    const double disc = kd + s * s - kd * q;
    if (disc < 0.0) continue;
    const double lambda = (s + std::sqrt(disc)) / kd;

    bool feasible = true;
    double mass = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double gap = lambda - sorted_beta[i];
      if (!(gap > 0.0)) {
        feasible = false;
        break;
      }
      mass += gap;
    }
    if (!feasible || !(lambda < best_lambda)) continue;

    best_lambda = lambda;
    best.weights.assign(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) best.weights[i] = (lambda - sorted_beta[i]) / mass;
    best.support = k;
  }

  if (best.weights.empty()) {
    throw std::logic_error("solve_by_enumeration: no feasible support size");
  }
  best.objective = surrogate_objective(best.weights, sorted_beta);
  return best;
}

double restricted_optimum(std::span<const double> sorted_beta, std::size_t k) {
  if (k == 0 || k > sorted_beta.size()) throw std::out_of_range("restricted_optimum: bad k");
  return solve_by_enumeration(sorted_beta.first(k)).objective;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("project_to_simplex: empty vector");
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());

  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }

  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

OracleResult solve_by_projected_gradient(std::span<const double> beta, std::size_t steps,
                                         double tolerance) {
  const std::size_t n = beta.size();
  if (n == 0) throw std::invalid_argument("solve_by_projected_gradient: beta must be nonempty");
  if (steps == 0) throw std::invalid_argument("solve_by_projected_gradient: steps must be >= 1");

  std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
  std::vector<double> trial(n);

  OracleResult best;
  best.method = Method::ProjectedGradient;
  best.weights = alpha;
  best.objective = surrogate_objective(alpha, beta);
  best.converged = false;

  for (std::size_t t = 1; t <= steps; ++t) {
    double norm = 0.0;
    for (double a : alpha) norm += a * a;
    norm = std::sqrt(norm);

    const double eta = 1.0 / std::sqrt(static_cast<double>(t));
    for (std::size_t i = 0; i < n; ++i) {
      // ||alpha||_2 >= 1/sqrt(n) on the simplex, so the norm term is differentiable here.
      const double grad = alpha[i] / norm + beta[i];
      trial[i] = alpha[i] - eta * grad;
    }
    auto next = project_to_simplex(trial);

    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, std::abs(next[i] - alpha[i]));
    alpha = std::move(next);
    best.steps_taken = t;

    const double value = surrogate_objective(alpha, beta);
    if (value < best.objective) {
      best.objective = value;
      best.weights = alpha;
    }
    if (moved <= tolerance) {
      best.converged = true;
      break;
    }
  }
  return best;
}

}  // namespace kstar::oracle
