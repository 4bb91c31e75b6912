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

// Reference solvers for min_{alpha in simplex} ||alpha||_2 + alpha . beta.
// Slow on purpose; they exist to certify the greedy solver, not to replace it.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace kstar::oracle {

enum class Method { Enumeration, ProjectedGradient };

std::string_view to_string(Method method);

struct OracleResult {
  /// Simplex weights in the same order as the input beta.
  std::vector<double> weights;
  /// ||weights||_2 + weights . beta, evaluated directly.
  double objective = 0.0;
  Method method = Method::Enumeration;
  /// Enumeration: number of positive weights of the chosen candidate.
  std::size_t support = 0;
  /// Gradient: false when the step budget ran out before iterates settled.
  bool converged = true;
  std::size_t steps_taken = 0;
};

/// ||alpha||_2 + alpha . beta.
double surrogate_objective(std::span<const double> alpha, std::span<const double> beta);

/// Tries every support size k with the closed-form multiplier, keeps the
/// candidates whose weights are all strictly positive and returns the best one.
/// O(n^2). Expects sorted nondecreasing beta.
OracleResult solve_by_enumeration(std::span<const double> sorted_beta);

/// Optimum over weight vectors supported on the first k entries only.
double restricted_optimum(std::span<const double> sorted_beta, std::size_t k);

/// Projected subgradient descent with step 1/sqrt(t), starting from uniform
/// weights. Stops early once an update moves no coordinate by more than
/// `tolerance`; returns the best iterate seen.
OracleResult solve_by_projected_gradient(std::span<const double> beta, std::size_t steps,
                                         double tolerance);

/// Euclidean projection onto the probability simplex (sort and threshold).
std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace kstar::oracle
