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

#include "inferq/table.h"

#include <cmath>
#include <cstring>

#include "inferq/error.h"

namespace inferq {

Column make_column(DataType type) {
  switch (type) {
    case DataType::kInt64: return std::vector<int64_t>{};
    case DataType::kFloat64: return std::vector<double>{};
    case DataType::kBool: return std::vector<uint8_t>{};
    case DataType::kString: return std::vector<std::string>{};
  }
  return std::vector<double>{};
}

size_t column_size(const Column& c) {
  return std::visit([](const auto& v) { return v.size(); }, c);
}

DataType column_type(const Column& c) { return static_cast<DataType>(c.index()); }

Value column_value(const Column& c, size_t row) {
  switch (column_type(c)) {
    case DataType::kInt64: return std::get<0>(c)[row];
    case DataType::kFloat64: return std::get<1>(c)[row];
    case DataType::kBool: return std::get<2>(c)[row] != 0;
    case DataType::kString: return std::get<3>(c)[row];
  }
  return {};
}

void append_value(Column& c, const Value& v) {
  if (column_type(c) != type_of(v)) {
    throw Error(ErrorCode::kTypeMismatch, "value of type " + std::string(type_name(type_of(v))) +
                                              " appended to " +
                                              std::string(type_name(column_type(c))) + " column");
  }
  switch (column_type(c)) {
    case DataType::kInt64: std::get<0>(c).push_back(std::get<int64_t>(v)); break;
    case DataType::kFloat64: std::get<1>(c).push_back(std::get<double>(v)); break;
    case DataType::kBool: std::get<2>(c).push_back(std::get<bool>(v) ? 1 : 0); break;
    case DataType::kString: std::get<3>(c).push_back(std::get<std::string>(v)); break;
  }
}

Column gather(const Column& c, std::span<const uint32_t> indices) {
  return std::visit(
      [&](const auto& v) -> Column {
        std::remove_cvref_t<decltype(v)> out;
        out.reserve(indices.size());
        for (uint32_t i : indices) out.push_back(v[i]);
        return out;
      },
      c);
}

Column slice(const Column& c, size_t offset, size_t count) {
  return std::visit(
      [&](const auto& v) -> Column {
        return std::remove_cvref_t<decltype(v)>(v.begin() + offset, v.begin() + offset + count);
      },
      c);
}

void append_column(Column& dst, const Column& src) {
  std::visit(
      [&](auto& d) {
        const auto& s = std::get<std::remove_cvref_t<decltype(d)>>(src);
        d.insert(d.end(), s.begin(), s.end());
      },
      dst);
}

Table::Table(Schema schema, std::vector<Column> columns) : schema_(std::move(schema)) {
  if (columns.size() != schema_.size()) {
    throw Error(ErrorCode::kValidationError, "table has " + std::to_string(columns.size()) +
                                                 " columns, schema declares " +
                                                 std::to_string(schema_.size()));
  }
  rows_ = columns.empty() ? 0 : column_size(columns[0]);
  for (size_t i = 0; i < columns.size(); ++i) {
    if (column_type(columns[i]) != schema_[i].type) {
      throw Error(ErrorCode::kValidationError, "column '" + schema_[i].name + "' has the wrong type");
    }
    if (column_size(columns[i]) != rows_) {
      throw Error(ErrorCode::kValidationError, "column '" + schema_[i].name + "' has a different length");
    }
    columns_.push_back(std::make_shared<const Column>(std::move(columns[i])));
  }
}

const Column& Table::column(std::string_view name) const {
  auto idx = schema_.index_of(name);
  if (!idx) throw Error(ErrorCode::kUnknownColumn, "no column '" + std::string(name) + "'");
  return *columns_[*idx];
}

const Column& Batch::column(std::string_view name) const {
  auto idx = schema.index_of(name);
  if (!idx) throw Error(ErrorCode::kMissingColumn, "batch has no column '" + std::string(name) + "'");
  return columns[*idx];
}

Batch make_batch(Schema schema, std::vector<Column> columns) {
  Batch out;
  const size_t n = columns.empty() ? 0 : column_size(columns[0]);
  out.schema = std::move(schema);
  out.columns = std::move(columns);
  out.row_ids.resize(n);
  for (size_t i = 0; i < n; ++i) out.row_ids[i] = i;
  return out;
}

Batch gather_batch(const Batch& b, std::span<const uint32_t> indices) {
  Batch out;
  out.schema = b.schema;
  out.columns.reserve(b.columns.size());
  for (const auto& c : b.columns) out.columns.push_back(gather(c, indices));
  out.row_ids.reserve(indices.size());
  for (uint32_t i : indices) out.row_ids.push_back(b.row_ids[i]);
  return out;
}

namespace {

bool doubles_match(double a, double b, double rel_tol) {
  if (std::memcmp(&a, &b, sizeof(double)) == 0) return true;
  if (rel_tol <= 0.0) return false;
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= rel_tol * scale;
}

}  // namespace

std::string compare_tables(const Table& expected, const Table& actual, double rel_tol) {
  if (!(expected.schema() == actual.schema())) return "schemas differ";
  if (expected.num_rows() != actual.num_rows()) {
    return "row counts differ: " + std::to_string(expected.num_rows()) + " vs " +
           std::to_string(actual.num_rows());
  }
  for (size_t c = 0; c < expected.num_columns(); ++c) {
    const Column& e = expected.column(c);
    const Column& a = actual.column(c);
    for (size_t r = 0; r < expected.num_rows(); ++r) {
      bool same;
      if (column_type(e) == DataType::kFloat64) {
        same = doubles_match(std::get<1>(e)[r], std::get<1>(a)[r], rel_tol);
      } else {
        same = column_value(e, r) == column_value(a, r);
      }
      if (!same) {
        return "row " + std::to_string(r) + " column '" + expected.schema()[c].name +
               "': " + format_value(column_value(e, r)) + " vs " + format_value(column_value(a, r));
      }
    }
  }
  return {};
}

}  // namespace inferq
