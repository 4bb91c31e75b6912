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
#include <string>
#include <string_view>
#include <vector>

namespace kstar {

/// Read-only view of one feature vector (a row of a dataset or a query).
using FeatureView = std::span<const double>;

enum class MetricKind { Euclidean, Manhattan, Chebyshev };

std::string_view to_string(MetricKind metric);
std::optional<MetricKind> parse_metric(std::string_view name);

/// Immutable labeled point set stored row-major.
///
/// Construction validates that every coordinate and label is finite and that
/// all rows share one dimension; a constructed dataset never changes.
class LabeledDataset {
 public:
  LabeledDataset(std::vector<std::vector<double>> points, std::vector<double> labels);

  /// `coords` holds `labels.size()` rows of `dim` values each.
  static LabeledDataset from_flat(std::vector<double> coords, std::vector<double> labels,
                                  std::size_t dim);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  FeatureView point(std::size_t i) const {
    return FeatureView(coords_).subspan(i * dim_, dim_);
  }
  double label(std::size_t i) const { return labels_[i]; }
  std::span<const double> labels() const noexcept { return labels_; }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Rows at `indices` (in that order) as a new dataset.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  /// Same points with labels replaced; used to probe leakage in tests.
  LabeledDataset with_labels(std::vector<double> labels) const;

 private:
  LabeledDataset(std::vector<double> coords, std::vector<double> labels, std::size_t dim,
                 int /*tag*/);
  static LabeledDataset from_rows(const std::vector<std::vector<double>>& points,
                                  std::vector<double>&& labels);

  std::vector<double> coords_;
  std::vector<double> labels_;
  std::size_t dim_ = 0;
};

/// Distances from a query to every dataset point, sorted nondecreasing.
/// `order[j]` is the dataset index of the j-th nearest point.
struct DistanceProfile {
  std::vector<double> distances;
  std::vector<std::size_t> order;

  std::size_t size() const noexcept { return distances.size(); }
};

/// Throws std::invalid_argument on length mismatch.
double distance(FeatureView a, FeatureView b, MetricKind metric);

/// Exhaustive scan plus stable sort; ties keep ascending dataset index.
DistanceProfile profile(const LabeledDataset& ds, FeatureView query, MetricKind metric);

/// Throws std::invalid_argument unless every entry is finite and the length is `dim`.
void validate_query(FeatureView query, std::size_t dim);

}  // namespace kstar
