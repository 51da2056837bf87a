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

#ifndef INFERQ_TABLE_H_
#define INFERQ_TABLE_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "inferq/value.h"

namespace inferq {

// Bool columns store 0/1 bytes.
using Column = std::variant<std::vector<int64_t>, std::vector<double>, std::vector<uint8_t>,
                            std::vector<std::string>>;

Column make_column(DataType type);
size_t column_size(const Column& c);
DataType column_type(const Column& c);
Value column_value(const Column& c, size_t row);
void append_value(Column& c, const Value& v);
// out[i] = c[indices[i]]
Column gather(const Column& c, std::span<const uint32_t> indices);
Column slice(const Column& c, size_t offset, size_t count);
void append_column(Column& dst, const Column& src);

// Immutable after construction: equal-length, typed, fully populated columns.
class Table {
 public:
  Table() = default;
  // Throws ValidationError on length or type mismatch.
  Table(Schema schema, std::vector<Column> columns);

  const Schema& schema() const { return schema_; }
  size_t num_rows() const { return rows_; }
  size_t num_columns() const { return columns_.size(); }
  const Column& column(size_t i) const { return *columns_[i]; }
  const Column& column(std::string_view name) const;
  Value value(size_t row, size_t col) const { return column_value(*columns_[col], row); }

 private:
  Schema schema_;
  std::vector<std::shared_ptr<const Column>> columns_;
  size_t rows_ = 0;
};

// A slice of rows flowing between operators. `row_ids` records each row's
// position in the scan; RouteUnion restores input order from it.
struct Batch {
  Schema schema;
  std::vector<Column> columns;
  std::vector<uint64_t> row_ids;

  size_t size() const { return row_ids.size(); }
  const Column& column(std::string_view name) const;
};

// Batch over `columns` with row ids 0..n-1.
Batch make_batch(Schema schema, std::vector<Column> columns);
Batch gather_batch(const Batch& b, std::span<const uint32_t> indices);

// Per-cell comparison; FLOAT64 cells match when bit-identical or within
// `rel_tol` relative error. Returns an empty string on equality, otherwise a
// description of the first difference.
std::string compare_tables(const Table& expected, const Table& actual, double rel_tol = 0.0);

}  // namespace inferq

#endif  // INFERQ_TABLE_H_
