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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace kstar {
namespace {

LabeledDataset parse(const std::string& text, const CsvOptions& options = {}) {
  std::istringstream in(text);
  return parse_csv(in, options);
}

std::pair<std::size_t, std::size_t> error_position(const std::string& text,
                                                   const CsvOptions& options = {}) {
  try {
    parse(text, options);
  } catch (const CsvError& e) {
    return {e.row(), e.column()};
  }
  ADD_FAILURE() << "no CsvError for: " << text;
  return {0, 0};
}

TEST(ParseCsv, TwoRowsLabelLast) {
  const auto ds = parse("1.0,2.0,0\n3.0,4.0,1");
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.dim(), 2u);
  EXPECT_EQ(ds.label(0), 0.0);
  EXPECT_EQ(ds.label(1), 1.0);
  EXPECT_EQ(ds.point(1)[0], 3.0);
}

TEST(ParseCsv, HeaderSkipped) {
  const auto ds = parse("x,y,label\n1,2,3\n", {.has_header = true});
  EXPECT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.label(0), 3.0);
}

TEST(ParseCsv, ExplicitLabelColumnAndRowOrder) {
  const auto ds = parse("7,1,2\n8,3,4\n9,5,6\n", {.label_column = 0});
  EXPECT_EQ(ds.dim(), 2u);
  EXPECT_EQ(ds.label(2), 9.0);
  EXPECT_EQ(ds.point(0)[0], 1.0);
  EXPECT_EQ(ds.point(2)[1], 6.0);
}

TEST(ParseCsv, QuotedFieldsBlankLinesAndCrlf) {
  const auto ds = parse("\"1.5\", 2 ,\"0\"\r\n\n  \n-3e-1,+4,1\r\n");
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.point(0)[0], 1.5);
  EXPECT_EQ(ds.point(0)[1], 2.0);
  EXPECT_EQ(ds.point(1)[0], -0.3);
  EXPECT_EQ(ds.point(1)[1], 4.0);
}

TEST(ParseCsv, LabelMap) {
  const auto ds = parse("0.1,N\n0.2,O\n0.3,1\n", {.label_map = parse_label_map("N=0,O=1")});
  EXPECT_EQ(ds.labels()[0], 0.0);
  EXPECT_EQ(ds.labels()[1], 1.0);
  EXPECT_EQ(ds.labels()[2], 1.0);
}

TEST(ParseCsv, ErrorsNameRowAndColumn) {
  EXPECT_EQ(error_position("1,2,3\n4,abc,6\n"), (std::pair<std::size_t, std::size_t>{2, 2}));
  EXPECT_EQ(error_position("1,2,3\n4,5\n"), (std::pair<std::size_t, std::size_t>{2, 3}));
  EXPECT_EQ(error_position("h1,h2\n1,2\n\n3,inf\n", {.has_header = true}),
            (std::pair<std::size_t, std::size_t>{4, 2}));
  EXPECT_EQ(error_position("1,\"2\n"), (std::pair<std::size_t, std::size_t>{1, 2}));
  EXPECT_EQ(error_position("1,N\n", {}), (std::pair<std::size_t, std::size_t>{1, 2}));
  EXPECT_EQ(error_position("1,2\n", {.label_column = 5}).first, 1u);
}

TEST(ParseCsv, EmptyInputRejected) {
  EXPECT_THROW(parse(""), CsvError);
  EXPECT_THROW(parse("\n\n"), CsvError);
  EXPECT_THROW(parse("a,b\n", {.has_header = true}), CsvError);
  EXPECT_THROW(parse("1\n2\n"), CsvError);
}

TEST(LoadCsv, FileRoundTripAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "kstar_dataset_io_test.csv";
  {
    std::ofstream out(path);
    out << "1,2,0.5\n3,4,1.5\n";
  }
  const auto ds = load_csv(path);
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.label(1), 1.5);

  const auto queries = load_query_rows(path);
  ASSERT_EQ(queries.size(), 2u);
  EXPECT_EQ(queries[1], (std::vector<double>{3, 4, 1.5}));
  std::filesystem::remove(path);

  EXPECT_THROW(load_csv(dir / "kstar_no_such_file.csv"), std::runtime_error);
}

TEST(ParseReal, AcceptsAndRejects) {
  EXPECT_EQ(parse_real("2.5"), 2.5);
  EXPECT_EQ(parse_real(" -1e3 "), -1000.0);
  EXPECT_EQ(parse_real("+7"), 7.0);
  EXPECT_FALSE(parse_real(""));
  EXPECT_FALSE(parse_real("1.0x"));
  EXPECT_FALSE(parse_real("nan"));
  EXPECT_FALSE(parse_real("inf"));
  EXPECT_FALSE(parse_real("1e999"));
  EXPECT_FALSE(parse_real("+"));
}

TEST(ParseRealList, Examples) {
  EXPECT_EQ(parse_real_list("0.1,0.5,2.0"), (std::vector<double>{0.1, 0.5, 2.0}));
  EXPECT_EQ(parse_real_list("3"), std::vector<double>{3.0});
  EXPECT_THROW(parse_real_list(""), std::invalid_argument);
  EXPECT_THROW(parse_real_list("1,,2"), std::invalid_argument);
  EXPECT_THROW(parse_real_list("1,2,"), std::invalid_argument);
  EXPECT_THROW(parse_real_list("1;2"), std::invalid_argument);
}

TEST(ParseLabelMap, Examples) {
  const auto m = parse_label_map("N=0, O = 1");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.at("N"), 0.0);
  EXPECT_EQ(m.at("O"), 1.0);
  EXPECT_THROW(parse_label_map("N"), std::invalid_argument);
  EXPECT_THROW(parse_label_map("=1"), std::invalid_argument);
  EXPECT_THROW(parse_label_map("N=x"), std::invalid_argument);
}

}  // namespace
}  // namespace kstar
