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

#ifndef INFERQ_TOOLS_BENCH_H_
#define INFERQ_TOOLS_BENCH_H_

#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "inferq/model_source.h"
#include "inferq/optimizer.h"
#include "inferq/stats.h"
#include "inferq/table.h"

namespace inferq::bench {

struct FlagSet {
  std::string name;
  OptimizerConfig config;
};

struct BenchCase {
  std::string name;
  std::string query;
  std::map<std::string, Table> tables;
  std::shared_ptr<ModelSource> models;
  std::vector<FlagSet> flag_sets;  // the first is the baseline
  int repetitions = 5;
};

struct BenchRow {
  std::string case_name;
  std::string flags;
  size_t rows = 0;
  double median_ms = 0.0;
  double speedup = 0.0;
};

// Rule names accepted by --disable and flag sets.
const std::vector<std::string>& rule_names();
// Enables exactly `rules` (names from rule_names(), or "all").
OptimizerConfig config_with(const std::vector<std::string>& rules);
// Default config minus `rules`.
OptimizerConfig config_without(const std::vector<std::string>& rules);

// Reads a suite document. Cases either point at a data directory, query
// file and model files, or name a generated workload. Throws
// ValidationError when a case has fewer than two flag sets.
std::vector<BenchCase> load_suite(const std::filesystem::path& path);

// Runs every flag set once untimed, checks its output against the
// baseline's (relative tolerance 1e-12), then times `repetitions` runs of
// optimize + execute. Throws EquivalenceFailure before any timing.
std::vector<BenchRow> run_case(const BenchCase& c, std::ostream* progress = nullptr);

void write_header(std::ostream& out);
void write_row(std::ostream& out, const BenchRow& row);

}  // namespace inferq::bench

#endif  // INFERQ_TOOLS_BENCH_H_
