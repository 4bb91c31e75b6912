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

#include "kstar/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace kstar {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits one line on commas; a field wrapped in double quotes may contain
// commas and "" escapes. Multi-line quoted fields are not supported.
std::vector<std::string> split_fields(std::string_view line, std::size_t row) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && trim(current).empty()) {
      quoted = true;
      was_quoted = true;
      current.clear();
    } else if (c == ',') {
      fields.emplace_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw CsvError(row, fields.size() + 1, "unterminated quoted field");
  fields.emplace_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

CsvError::CsvError(std::size_t row, std::size_t column, const std::string& what)
    : std::runtime_error("row " + std::to_string(row) + ", column " + std::to_string(column) +
                         ": " + what),
      row_(row),
      column_(column) {}

std::optional<double> parse_real(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::vector<double> parse_real_list(std::string_view text) {
  if (trim(text).empty()) throw std::invalid_argument("empty number list");
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    const auto value = parse_real(token);
    if (!value) {
      throw std::invalid_argument("malformed number '" + std::string(trim(token)) + "' in list");
    }
    out.push_back(*value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::map<std::string, double, std::less<>> parse_label_map(std::string_view text) {
  std::map<std::string, double, std::less<>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto entry = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw std::invalid_argument("label map entry '" + std::string(entry) + "' is not NAME=VALUE");
    }
    const auto value = parse_real(entry.substr(eq + 1));
    if (!value) throw std::invalid_argument("label map value in '" + std::string(entry) + "' is not a real");
    out[std::string(trim(entry.substr(0, eq)))] = *value;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

LabeledDataset parse_csv(std::istream& in, const CsvOptions& options) {
  std::vector<double> coords;
  std::vector<double> labels;
  std::size_t width = 0;
  std::size_t label_col = 0;
  bool header_pending = options.has_header;

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (is_blank(line)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line, row);
    if (width == 0) {
      width = fields.size();
      if (width < 2) throw CsvError(row, 1, "need at least one feature column and a label column");
      label_col = options.label_column.value_or(width - 1);
      if (label_col >= width) {
        throw CsvError(row, label_col + 1,
                       "label column out of range (row has " + std::to_string(width) + " fields)");
      }
    } else if (fields.size() != width) {
      throw CsvError(row, std::min(fields.size(), width) + 1,
                     "expected " + std::to_string(width) + " fields, found " +
                         std::to_string(fields.size()));
    }

    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) {
        if (auto it = options.label_map.find(fields[c]); it != options.label_map.end()) {
          labels.push_back(it->second);
          continue;
        }
      }
      const auto value = parse_real(fields[c]);
      if (!value) throw CsvError(row, c + 1, "cannot parse '" + fields[c] + "' as a finite real");
      if (c == label_col) {
        labels.push_back(*value);
      } else {
        coords.push_back(*value);
      }
    }
  }
  if (labels.empty()) throw CsvError(row == 0 ? 1 : row, 1, "no data rows");
  return LabeledDataset::from_flat(std::move(coords), std::move(labels), width - 1);
}

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return parse_csv(in, options);
}

std::vector<std::vector<double>> load_query_rows(const std::filesystem::path& path,
                                                 bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++row;
    if (is_blank(line)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line, row);
    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = parse_real(fields[c]);
      if (!value) throw CsvError(row, c + 1, "cannot parse '" + fields[c] + "' as a finite real");
      values.push_back(*value);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw CsvError(1, 1, "no query rows");
  return rows;
}

}  // namespace kstar
