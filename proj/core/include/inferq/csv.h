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

#ifndef INFERQ_CSV_H_
#define INFERQ_CSV_H_

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "inferq/table.h"

namespace inferq {

// RFC 4180 CSV with a header row that must equal the schema's names in
// order. Throws ParseError(row, column), MissingValueError, NonFiniteError.
Table read_csv(std::istream& in, const Schema& schema, const std::string& source = "<stream>");
Table load_csv(const std::filesystem::path& path, const Schema& schema);

// Header-driven type inference: every cell numeric -> FLOAT64, every cell
// true/false -> BOOL, otherwise STRING.
Schema infer_csv_schema(const std::filesystem::path& path);

void write_csv(const Table& table, std::ostream& out);
void write_csv_file(const Table& table, const std::filesystem::path& path);

// Schema sidecar `<table>.schema.json`: {"columns": [{"name", "type"}, ...]}.
Schema load_schema_file(const std::filesystem::path& path);
void save_schema_file(const Schema& schema, const std::filesystem::path& path);

// Loads every `<name>.csv` in `dir`, using `<name>.schema.json` when present
// and inference otherwise.
std::map<std::string, Table> load_data_dir(const std::filesystem::path& dir);

}  // namespace inferq

#endif  // INFERQ_CSV_H_
