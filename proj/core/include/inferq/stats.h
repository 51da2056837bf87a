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

#ifndef INFERQ_STATS_H_
#define INFERQ_STATS_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inferq/expr.h"
#include "inferq/table.h"

namespace inferq {

inline constexpr size_t kHistogramBuckets = 16;
inline constexpr size_t kDistinctCutoff = 256;

struct ColumnStats {
  std::string name;
  DataType type = DataType::kFloat64;
  // Numeric columns only; meaningless when the table is empty.
  double min = 0.0;
  double max = 0.0;
  std::array<uint64_t, kHistogramBuckets> histogram{};
  // Exact up to kDistinctCutoff; beyond that `distinct_exact` is false and
  // `distinct_count` is kDistinctCutoff + 1.
  uint64_t distinct_count = 0;
  bool distinct_exact = true;
  // Observed values, sorted, present iff distinct_exact.
  std::vector<Value> values;

  bool operator==(const ColumnStats&) const = default;
};

struct TableStats {
  std::string table;
  uint64_t row_count = 0;
  std::vector<ColumnStats> columns;

  const ColumnStats* find(const std::string& column) const;
  bool operator==(const TableStats&) const = default;
};

TableStats analyze(const Table& table, const std::string& name);

// Bucket a value falls in for a histogram over [min, max].
size_t bucket_of(double v, double min, double max);

// Estimated fraction of rows satisfying `predicate`, in [0, 1].
double selectivity(const Expr& predicate, const TableStats& stats);

std::string stats_to_json(const TableStats& stats);
TableStats stats_from_json(const std::string& text);
void save_stats_file(const TableStats& stats, const std::filesystem::path& path);
TableStats load_stats_file(const std::filesystem::path& path);
// Every `<table>.stats` file in `dir`.
std::map<std::string, TableStats> load_stats_dir(const std::filesystem::path& dir);

}  // namespace inferq

#endif  // INFERQ_STATS_H_
