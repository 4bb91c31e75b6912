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

#include "kstar/metricspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kstar {

std::string_view to_string(MetricKind metric) {
  switch (metric) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Manhattan: return "manhattan";
    case MetricKind::Chebyshev: return "chebyshev";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric(std::string_view name) {
  if (name == "euclidean" || name == "l2") return MetricKind::Euclidean;
  if (name == "manhattan" || name == "l1") return MetricKind::Manhattan;
  if (name == "chebyshev" || name == "linf") return MetricKind::Chebyshev;
  return std::nullopt;
}

LabeledDataset::LabeledDataset(std::vector<double> coords, std::vector<double> labels,
                               std::size_t dim, int)
    : coords_(std::move(coords)), labels_(std::move(labels)), dim_(dim) {
  if (labels_.empty()) throw std::invalid_argument("dataset must contain at least one point");
  if (dim_ == 0) throw std::invalid_argument("dataset dimension must be positive");
  if (coords_.size() != labels_.size() * dim_) {
    throw std::invalid_argument("coordinate buffer does not match n * dim");
  }
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      throw std::invalid_argument("non-finite coordinate in row " + std::to_string(i / dim_) +
                                  ", column " + std::to_string(i % dim_));
    }
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!std::isfinite(labels_[i])) {
      throw std::invalid_argument("non-finite label in row " + std::to_string(i));
    }
  }
}

namespace {

std::vector<double> flatten_rows(const std::vector<std::vector<double>>& points,
                                 std::size_t label_count) {
  if (points.size() != label_count) {
    throw std::invalid_argument("points and labels differ in length");
  }
  if (points.empty()) throw std::invalid_argument("dataset must contain at least one point");
  const std::size_t d = points.front().size();
  std::vector<double> flat;
  flat.reserve(points.size() * d);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d) {
      throw std::invalid_argument("row " + std::to_string(i) + " has dimension " +
                                  std::to_string(points[i].size()) + ", expected " +
                                  std::to_string(d));
    }
    flat.insert(flat.end(), points[i].begin(), points[i].end());
  }
  return flat;
}

}  // namespace

LabeledDataset::LabeledDataset(std::vector<std::vector<double>> points,
                               std::vector<double> labels)
    : LabeledDataset(from_rows(points, std::move(labels))) {}

LabeledDataset LabeledDataset::from_rows(const std::vector<std::vector<double>>& points,
                                         std::vector<double>&& labels) {
  auto flat = flatten_rows(points, labels.size());
  const std::size_t dim = points.front().size();
  return LabeledDataset(std::move(flat), std::move(labels), dim, 0);
}

LabeledDataset LabeledDataset::from_flat(std::vector<double> coords, std::vector<double> labels,
                                         std::size_t dim) {
  return LabeledDataset(std::move(coords), std::move(labels), dim, 0);
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> coords;
  std::vector<double> labels;
  coords.reserve(indices.size() * dim_);
  labels.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= size()) throw std::out_of_range("subset index out of range");
    auto row = point(idx);
    coords.insert(coords.end(), row.begin(), row.end());
    labels.push_back(labels_[idx]);
  }
  return LabeledDataset(std::move(coords), std::move(labels), dim_, 0);
}

LabeledDataset LabeledDataset::with_labels(std::vector<double> labels) const {
  if (labels.size() != size()) throw std::invalid_argument("label count mismatch");
  return LabeledDataset(coords_, std::move(labels), dim_, 0);
}

double distance(FeatureView a, FeatureView b, MetricKind metric) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("distance: dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  double acc = 0.0;
  switch (metric) {
    case MetricKind::Euclidean:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
      }
      return std::sqrt(acc);
    case MetricKind::Manhattan:
      for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
      return acc;
    case MetricKind::Chebyshev:
      for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
      return acc;
  }
  throw std::invalid_argument("distance: unknown metric");
}

void validate_query(FeatureView query, std::size_t dim) {
  if (query.size() != dim) {
    throw std::invalid_argument("query has dimension " + std::to_string(query.size()) +
                                ", dataset has " + std::to_string(dim));
  }
  for (double v : query) {
    if (!std::isfinite(v)) throw std::invalid_argument("query contains a non-finite value");
  }
}

DistanceProfile profile(const LabeledDataset& ds, FeatureView query, MetricKind metric) {
  validate_query(query, ds.dim());
  const std::size_t n = ds.size();

  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = distance(ds.point(i), query, metric);

  DistanceProfile out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&raw](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  out.distances.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.distances[j] = raw[out.order[j]];
  return out;
}

}  // namespace kstar
