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

#ifndef INFERQ_WORKLOAD_H_
#define INFERQ_WORKLOAD_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "inferq/model.h"
#include "inferq/table.h"

namespace inferq {

// A generated table, the model the query scores with, and the query.
struct Workload {
  std::string table_name;
  Table table;
  std::shared_ptr<const ModelPipeline> model;
  std::string query;
};

struct ChurnOptions {
  size_t rows = 100000;
  size_t features = 100;
  size_t trees = 100;
  uint64_t seed = 42;
};

// Uniform [0, 1) features f0..f{n-1}. Every tree is full with depth 7 and
// splits first on f0 < 0.1, then on f1..f4 only. The query keeps rows with
// f0 >= 0.1, so the left half of every tree is unreachable.
Workload churn_workload(const ChurnOptions& options);
ModelPipeline churn_model(const ChurnOptions& options);
Table churn_table(const ChurnOptions& options);

struct RegionOptions {
  size_t rows = 10000;
  size_t trees = 20;
  uint64_t seed = 7;
  // Values the `region` column cycles through, chosen uniformly.
  std::vector<double> regions = {1.0, 2.0};
};

// Table `regions(region, x0..x4)`; every tree splits first on region < 1.5
// and then only on the x columns.
Workload region_workload(const RegionOptions& options);
ModelPipeline region_model(const RegionOptions& options);
Table region_table(const RegionOptions& options);

}  // namespace inferq

#endif  // INFERQ_WORKLOAD_H_
