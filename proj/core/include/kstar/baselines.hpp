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

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "kstar/metricspace.hpp"

namespace kstar {

enum class KernelVariant { Gaussian, Epanechnikov, Triangular };

std::string_view to_string(KernelVariant variant);
std::optional<KernelVariant> parse_kernel(std::string_view name);

/// Smoothing kernel with bandwidth sigma > 0, evaluated on a metric distance r.
class Kernel {
 public:
  Kernel(KernelVariant variant, double sigma);

  KernelVariant variant() const noexcept { return variant_; }
  double sigma() const noexcept { return sigma_; }

  /// Gaussian: exp(-r^2 / 2 sigma^2) / sigma.
  /// Epanechnikov: 3/4 (1 - r^2 / sigma^2) for r <= sigma, else 0.
  /// Triangular: 1 - r / sigma for r <= sigma, else 0.
  double operator()(double r) const noexcept;

 private:
  KernelVariant variant_;
  double sigma_;
};

double kernel_value(const Kernel& kernel, double r);

/// Unweighted mean label of the k nearest points; ties follow the stable profile order.
/// Throws std::out_of_range unless 1 <= k <= n.
double knn_predict(const LabeledDataset& ds, FeatureView query, std::size_t k,
                   MetricKind metric = MetricKind::Euclidean);
double knn_from_profile(const DistanceProfile& profile, std::span<const double> labels,
                        std::size_t k);

/// Kernel-weighted label average. Falls back to the nearest neighbor's label
/// when every kernel weight is zero (compact kernels, all points beyond sigma).
double nw_predict(const LabeledDataset& ds, FeatureView query, const Kernel& kernel,
                  MetricKind metric = MetricKind::Euclidean);
double nw_from_profile(const DistanceProfile& profile, std::span<const double> labels,
                       const Kernel& kernel);

}  // namespace kstar
