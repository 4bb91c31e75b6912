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

#include "kstar/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kstar {

std::string_view to_string(KernelVariant variant) {
  switch (variant) {
    case KernelVariant::Gaussian: return "gaussian";
    case KernelVariant::Epanechnikov: return "epanechnikov";
    case KernelVariant::Triangular: return "triangular";
  }
  return "unknown";
}

std::optional<KernelVariant> parse_kernel(std::string_view name) {
  if (name == "gaussian") return KernelVariant::Gaussian;
  if (name == "epanechnikov") return KernelVariant::Epanechnikov;
  if (name == "triangular") return KernelVariant::Triangular;
  return std::nullopt;
}

Kernel::Kernel(KernelVariant variant, double sigma) : variant_(variant), sigma_(sigma) {
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    throw std::invalid_argument("kernel bandwidth sigma must be positive and finite");
  }
}

double Kernel::operator()(double r) const noexcept {
  const double u = r / sigma_;
  switch (variant_) {
    case KernelVariant::Gaussian:
      return std::exp(-0.5 * u * u) / sigma_;
    case KernelVariant::Epanechnikov:
      return r <= sigma_ ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelVariant::Triangular:
      return r <= sigma_ ? 1.0 - u : 0.0;
  }
  return 0.0;
}

double kernel_value(const Kernel& kernel, double r) { return kernel(r); }

double knn_from_profile(const DistanceProfile& profile, std::span<const double> labels,
                        std::size_t k) {
  if (k == 0 || k > profile.size()) {
    throw std::out_of_range("knn: k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(profile.size()) + "]");
  }
  const double ref = labels[profile.order.front()];
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) acc += labels[profile.order[j]] - ref;
  return ref + acc / static_cast<double>(k);
}

double knn_predict(const LabeledDataset& ds, FeatureView query, std::size_t k, MetricKind metric) {
  if (k == 0 || k > ds.size()) {
    throw std::out_of_range("knn: k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(ds.size()) + "]");
  }
  return knn_from_profile(profile(ds, query, metric), ds.labels(), k);
}

double nw_from_profile(const DistanceProfile& profile, std::span<const double> labels,
                       const Kernel& kernel) {
  if (profile.size() == 0) throw std::invalid_argument("nw: empty profile");
  const double ref = labels[profile.order.front()];
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const double w = kernel(profile.distances[j]);
    num += w * (labels[profile.order[j]] - ref);
    den += w;
  }
  // Gaussian weights can underflow as well, so this is not limited to compact kernels.
  if (!(den > 0.0)) return ref;
  return ref + num / den;
}

double nw_predict(const LabeledDataset& ds, FeatureView query, const Kernel& kernel,
                  MetricKind metric) {
  return nw_from_profile(profile(ds, query, metric), ds.labels(), kernel);
}

}  // namespace kstar
