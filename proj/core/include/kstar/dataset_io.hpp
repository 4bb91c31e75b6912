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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kstar/metricspace.hpp"

namespace kstar {

/// Parse failure at a 1-based (row, column) position of the input file.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t row, std::size_t column, const std::string& what);
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

struct CsvOptions {
  /// Zero-based label column; the last column when unset.
  std::optional<std::size_t> label_column;
  bool has_header = false;
  /// Optional mapping for categorical label cells (e.g. "N" -> 0, "O" -> 1).
  /// Cells not in the map must still parse as reals.
  std::map<std::string, double, std::less<>> label_map;
};

/// Comma-separated values with optional header and optional double quotes.
/// Blank lines are skipped; every other row must have the same field count.
LabeledDataset parse_csv(std::istream& in, const CsvOptions& options = {});
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Rows of query vectors (every column is a feature).
std::vector<std::vector<double>> load_query_rows(const std::filesystem::path& path,
                                                 bool has_header = false);

/// Strict decimal parse of a whole token; rejects empty, trailing junk, inf and nan.
std::optional<double> parse_real(std::string_view token);

/// "0.1,0.5,2" -> {0.1, 0.5, 2}. Throws std::invalid_argument on any malformed entry.
std::vector<double> parse_real_list(std::string_view text);

/// "N=0,O=1" -> {{"N", 0}, {"O", 1}}.
std::map<std::string, double, std::less<>> parse_label_map(std::string_view text);

}  // namespace kstar
