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

#ifndef INFERQ_VALUE_H_
#define INFERQ_VALUE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace inferq {

// Enumerator order matches the alternative order of Value.
enum class DataType { kInt64 = 0, kFloat64 = 1, kBool = 2, kString = 3 };

using Value = std::variant<int64_t, double, bool, std::string>;

std::string_view type_name(DataType type);
// Accepts the canonical upper-case names (INT64, FLOAT64, BOOL, STRING).
std::optional<DataType> parse_type_name(std::string_view name);

inline DataType type_of(const Value& v) {
  return static_cast<DataType>(v.index());
}

inline bool is_numeric(DataType t) {
  return t == DataType::kInt64 || t == DataType::kFloat64;
}

// Numeric value widened to double; throws TypeMismatch otherwise.
double as_double(const Value& v);

// Shortest text that parses back to the same double.
std::string format_double(double v);
// Literal spelling used by plan printers and CSV output.
std::string format_value(const Value& v);

struct Field {
  std::string name;
  DataType type;

  bool operator==(const Field&) const = default;
};

class Schema {
 public:
  Schema() = default;
  // Rejects duplicate names.
  explicit Schema(std::vector<Field> fields);

  const std::vector<Field>& fields() const { return fields_; }
  size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  const Field& operator[](size_t i) const { return fields_[i]; }

  std::optional<size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }
  // Throws UnknownColumn naming `context`.
  const Field& field(std::string_view name, std::string_view context = {}) const;
  std::vector<std::string> names() const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Field> fields_;
};

}  // namespace inferq

#endif  // INFERQ_VALUE_H_
