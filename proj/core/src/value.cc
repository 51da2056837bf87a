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

#include "inferq/value.h"

#include <charconv>
#include <cmath>
#include <unordered_set>

#include "inferq/error.h"

namespace inferq {

std::string_view type_name(DataType type) {
  switch (type) {
    case DataType::kInt64: return "INT64";
    case DataType::kFloat64: return "FLOAT64";
    case DataType::kBool: return "BOOL";
    case DataType::kString: return "STRING";
  }
  return "?";
}

std::optional<DataType> parse_type_name(std::string_view name) {
  if (name == "INT64") return DataType::kInt64;
  if (name == "FLOAT64") return DataType::kFloat64;
  if (name == "BOOL") return DataType::kBool;
  if (name == "STRING") return DataType::kString;
  return std::nullopt;
}

double as_double(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<int64_t>(&v)) return static_cast<double>(*i);
  throw Error(ErrorCode::kTypeMismatch,
              "expected a numeric value, got " + std::string(type_name(type_of(v))));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, res.ptr);
  if (std::isfinite(v) && out.find_first_of(".eE") == std::string::npos) {
    out += ".0";
  }
  return out;
}

std::string format_value(const Value& v) {
  switch (type_of(v)) {
    case DataType::kInt64: return std::to_string(std::get<int64_t>(v));
    case DataType::kFloat64: return format_double(std::get<double>(v));
    case DataType::kBool: return std::get<bool>(v) ? "TRUE" : "FALSE";
    case DataType::kString: {
      std::string out = "'";
      for (char c : std::get<std::string>(v)) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
  }
  return {};
}

Schema::Schema(std::vector<Field> fields) : fields_(std::move(fields)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& f : fields_) {
    if (!seen.insert(f.name).second) {
      throw Error(ErrorCode::kDuplicateColumn, "column '" + f.name + "' appears twice");
    }
  }
}

std::optional<size_t> Schema::index_of(std::string_view name) const {
  for (size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i].name == name) return i;
  }
  return std::nullopt;
}

const Field& Schema::field(std::string_view name, std::string_view context) const {
  auto idx = index_of(name);
  if (!idx) {
    std::string msg = "column '" + std::string(name) + "' not found";
    if (!context.empty()) msg += " in " + std::string(context);
    throw Error(ErrorCode::kUnknownColumn, msg);
  }
  return fields_[*idx];
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(fields_.size());
  for (const auto& f : fields_) out.push_back(f.name);
  return out;
}

}  // namespace inferq
