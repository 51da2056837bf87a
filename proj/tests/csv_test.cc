/*
 * Copyright 2026 The inferq Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "inferq/csv.h"
#include "inferq/error.h"
#include "support/temp_dir.h"

namespace inferq {
namespace {

const Schema kXY({{"x", DataType::kFloat64}, {"y", DataType::kString}});

ErrorCode read_error(const std::string& text, const Schema& schema, std::string* message = nullptr) {
  std::istringstream in(text);
  try {
    read_csv(in, schema);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::kUsage;
}

TEST(ReadCsv, ThreeRowsTyped) {
  std::istringstream in("x,y\n1.5,a\n2,\"b,c\"\n-3e2,\"say \"\"hi\"\"\"\n");
  Table t = read_csv(in, kXY);
  ASSERT_EQ(t.num_rows(), 3u);
  EXPECT_EQ(t.value(0, 0), Value(1.5));
  EXPECT_EQ(t.value(1, 1), Value(std::string("b,c")));
  EXPECT_EQ(t.value(2, 0), Value(-300.0));
  EXPECT_EQ(t.value(2, 1), Value(std::string("say \"hi\"")));
}

TEST(ReadCsv, HeaderMismatchIsParseError) {
  EXPECT_EQ(read_error("y,x\n1,a\n", kXY), ErrorCode::kParseError);
}

TEST(ReadCsv, BadCellNamesRowAndColumn) {
  std::string msg;
  EXPECT_EQ(read_error("x,y\n1,a\nabc,b\n", kXY, &msg), ErrorCode::kParseError);
  EXPECT_NE(msg.find("row 2"), std::string::npos);
  EXPECT_NE(msg.find("'x'"), std::string::npos);
}

TEST(ReadCsv, EmptyCellIsMissingValue) {
  EXPECT_EQ(read_error("x,y\n,a\n", kXY), ErrorCode::kMissingValue);
}

TEST(ReadCsv, NonFiniteRejected) {
  EXPECT_EQ(read_error("x,y\ninf,a\n", kXY), ErrorCode::kNonFinite);
  EXPECT_EQ(read_error("x,y\nnan,a\n", kXY), ErrorCode::kNonFinite);
}

TEST(ReadCsv, IntAndBoolColumns) {
  Schema s({{"n", DataType::kInt64}, {"b", DataType::kBool}});
  std::istringstream in("n,b\n-7,true\n9,false\n");
  Table t = read_csv(in, s);
  EXPECT_EQ(t.value(0, 0), Value(int64_t{-7}));
  EXPECT_EQ(t.value(1, 1), Value(false));
  EXPECT_EQ(read_error("n,b\n1.5,true\n", s), ErrorCode::kParseError);
}

TEST(ReadCsv, RowOrderPreservedThroughRoundTrip) {
  Schema s({{"n", DataType::kInt64}, {"x", DataType::kFloat64}, {"s", DataType::kString}});
  Table t(s, {std::vector<int64_t>{3, 1, 2}, std::vector<double>{0.1, 1e300, -0.0},
              std::vector<std::string>{"a,b", "\"q\"", "line\nbreak"}});
  std::ostringstream out;
  write_csv(t, out);
  std::istringstream in(out.str());
  EXPECT_EQ(compare_tables(t, read_csv(in, s)), "");
}

TEST(DataDir, UsesSidecarOrInference) {
  testing::TempDir tmp("csv");
  const auto& dir = tmp.path();
  std::ofstream(dir / "a.csv") << "n,flag,name\n1,true,x\n2,false,y\n";
  std::ofstream(dir / "b.csv") << "n\n5\n";
  save_schema_file(Schema({{"n", DataType::kInt64}}), dir / "b.schema.json");
  auto tables = load_data_dir(dir);
  ASSERT_EQ(tables.size(), 2u);
  const Schema& a = tables.at("a").schema();
  EXPECT_EQ(a[0].type, DataType::kFloat64);
  EXPECT_EQ(a[1].type, DataType::kBool);
  EXPECT_EQ(a[2].type, DataType::kString);
  EXPECT_EQ(tables.at("b").schema()[0].type, DataType::kInt64);
}

}  // namespace
}  // namespace inferq
