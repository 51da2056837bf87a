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

#include "inferq/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "inferq/error.h"
#include "json.hpp"

namespace inferq {

namespace {

// Streaming RFC 4180 record reader.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // False at end of input. `quoted[i]` tells whether field i was quoted.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    std::string field;
    bool in_quotes = false;
    bool at_field_start = true;
    while (true) {
      if (c == EOF) {
        if (in_quotes) throw Error(ErrorCode::kParseError, "unterminated quoted field at record " + std::to_string(record_ + 1));
        fields.push_back(std::move(field));
        break;
      }
      const char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field += '"';
          } else {
            in_quotes = false;
          }
        } else {
          field += ch;
        }
      } else if (ch == '"' && at_field_start) {
        in_quotes = true;
        at_field_start = false;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        at_field_start = true;
      } else if (ch == '\n' || ch == '\r') {
        if (ch == '\r' && in_.peek() == '\n') in_.get();
        fields.push_back(std::move(field));
        break;
      } else {
        field += ch;
        at_field_start = false;
      }
      c = in_.get();
    }
    ++record_;
    return true;
  }

 private:
  std::istream& in_;
  size_t record_ = 0;
};

bool is_blank_record(const std::vector<std::string>& f) { return f.size() == 1 && f[0].empty(); }

std::optional<bool> parse_bool(const std::string& s) {
  if (s == "true" || s == "TRUE" || s == "True") return true;
  if (s == "false" || s == "FALSE" || s == "False") return false;
  return std::nullopt;
}

[[noreturn]] void cell_error(ErrorCode code, const std::string& source, size_t row,
                             const std::string& column, const std::string& what) {
  throw Error(code, source + ": row " + std::to_string(row) + ", column '" + column + "': " + what);
}

}  // namespace

Table read_csv(std::istream& in, const Schema& schema, const std::string& source) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw Error(ErrorCode::kParseError, source + ": missing header row");
  if (fields != schema.names()) {
    std::string got;
    for (size_t i = 0; i < fields.size(); ++i) got += (i ? "," : "") + fields[i];
    throw Error(ErrorCode::kParseError, source + ": header '" + got + "' does not match schema");
  }
  std::vector<Column> columns;
  for (const auto& f : schema.fields()) columns.push_back(make_column(f.type));
  size_t row = 0;
  while (reader.next(fields)) {
    if (is_blank_record(fields)) continue;
    ++row;
    if (fields.size() != schema.size()) {
      throw Error(ErrorCode::kParseError, source + ": row " + std::to_string(row) + " has " +
                                              std::to_string(fields.size()) + " fields, expected " +
                                              std::to_string(schema.size()));
    }
    for (size_t c = 0; c < fields.size(); ++c) {
      const std::string& cell = fields[c];
      const std::string& name = schema[c].name;
      if (cell.empty()) cell_error(ErrorCode::kMissingValue, source, row, name, "empty cell");
      switch (schema[c].type) {
        case DataType::kInt64: {
          int64_t v = 0;
          auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
          if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
            cell_error(ErrorCode::kParseError, source, row, name, "'" + cell + "' is not INT64");
          }
          std::get<0>(columns[c]).push_back(v);
          break;
        }
        case DataType::kFloat64: {
          double v = 0;
          auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
          if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
            cell_error(ErrorCode::kParseError, source, row, name, "'" + cell + "' is not FLOAT64");
          }
          if (!std::isfinite(v)) cell_error(ErrorCode::kNonFinite, source, row, name, "non-finite value");
          std::get<1>(columns[c]).push_back(v);
          break;
        }
        case DataType::kBool: {
          auto v = parse_bool(cell);
          if (!v) cell_error(ErrorCode::kParseError, source, row, name, "'" + cell + "' is not BOOL");
          std::get<2>(columns[c]).push_back(*v ? 1 : 0);
          break;
        }
        case DataType::kString: std::get<3>(columns[c]).push_back(cell); break;
      }
    }
  }
  return Table(schema, std::move(columns));
}

Table load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_csv(in, schema, path.string());
}

Schema infer_csv_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  CsvReader reader(in);
  std::vector<std::string> header, fields;
  if (!reader.next(header)) throw Error(ErrorCode::kParseError, path.string() + ": missing header row");
  std::vector<bool> numeric(header.size(), true), boolean(header.size(), true);
  while (reader.next(fields)) {
    if (is_blank_record(fields)) continue;
    for (size_t c = 0; c < fields.size() && c < header.size(); ++c) {
      const std::string& cell = fields[c];
      double v;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        numeric[c] = false;
      }
      if (!parse_bool(cell)) boolean[c] = false;
    }
  }
  std::vector<Field> out;
  for (size_t c = 0; c < header.size(); ++c) {
    out.push_back({header[c], numeric[c]   ? DataType::kFloat64
                              : boolean[c] ? DataType::kBool
                                           : DataType::kString});
  }
  return Schema(std::move(out));
}

namespace {

void write_field(const std::string& s, std::ostream& out) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
  const Schema& schema = table.schema();
  for (size_t c = 0; c < schema.size(); ++c) {
    if (c) out << ',';
    write_field(schema[c].name, out);
  }
  out << '\n';
  for (size_t r = 0; r < table.num_rows(); ++r) {
    for (size_t c = 0; c < schema.size(); ++c) {
      if (c) out << ',';
      const Column& col = table.column(c);
      switch (column_type(col)) {
        case DataType::kInt64: out << std::get<0>(col)[r]; break;
        case DataType::kFloat64: out << format_double(std::get<1>(col)[r]); break;
        case DataType::kBool: out << (std::get<2>(col)[r] ? "true" : "false"); break;
        case DataType::kString: write_field(std::get<3>(col)[r], out); break;
      }
    }
    out << '\n';
  }
}

void write_csv_file(const Table& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_csv(table, out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

Schema load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  std::vector<Field> fields;
  if (!doc.contains("columns") || !doc["columns"].is_array()) {
    throw Error(ErrorCode::kParseError, path.string() + ": expected a 'columns' list");
  }
  for (const auto& c : doc["columns"]) {
    if (!c.contains("name") || !c.contains("type") || !c["name"].is_string() || !c["type"].is_string()) {
      throw Error(ErrorCode::kParseError, path.string() + ": column entries need name and type");
    }
    auto t = parse_type_name(c["type"].get<std::string>());
    if (!t) throw Error(ErrorCode::kParseError, path.string() + ": unknown type " + c["type"].dump());
    fields.push_back({c["name"].get<std::string>(), *t});
  }
  return Schema(std::move(fields));
}

void save_schema_file(const Schema& schema, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["columns"] = nlohmann::ordered_json::array();
  for (const auto& f : schema.fields()) {
    doc["columns"].push_back({{"name", f.name}, {"type", std::string(type_name(f.type))}});
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::map<std::string, Table> load_data_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "data directory " + dir.string() + " does not exist");
  }
  std::map<std::string, Table> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const std::string name = entry.path().stem().string();
    const auto schema_path = dir / (name + ".schema.json");
    Schema schema = std::filesystem::exists(schema_path) ? load_schema_file(schema_path)
                                                         : infer_csv_schema(entry.path());
    out.emplace(name, load_csv(entry.path(), schema));
  }
  return out;
}

}  // namespace inferq
