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

#ifndef INFERQ_TESTS_SUPPORT_GENERATORS_H_
#define INFERQ_TESTS_SUPPORT_GENERATORS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "inferq/domain.h"
#include "inferq/expr.h"
#include "inferq/model.h"
#include "inferq/plan.h"
#include "inferq/table.h"

namespace inferq::testing {

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int64_t integer(int64_t lo, int64_t hi) { return std::uniform_int_distribution<int64_t>(lo, hi)(engine_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(integer(0, static_cast<int64_t>(v.size()) - 1))];
  }
  // Multiples of 0.25 in [0, 4]: shared by thresholds, data and literals so
  // predicates regularly land on split boundaries.
  double grid() { return 0.25 * static_cast<double>(integer(0, 16)); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline const std::vector<std::string>& categories() {
  static const std::vector<std::string> kCats = {"red", "green", "blue"};
  return kCats;
}

// Table `t`: FLOAT64 columns c0..c{n-1}, low-cardinality FLOAT64 `g`
// (1, 2 or 3), INT64 `k` and STRING `s` (including an unseen category).
struct TableShape {
  size_t float_columns = 6;
};
Schema random_schema(const TableShape& shape);
Table random_table(Rng& rng, const Schema& schema, size_t rows);

struct ModelShape {
  size_t max_trees = 20;
  int max_depth = 6;
  bool allow_featurizers = true;
  bool allow_linear = true;
};

// A validated pipeline whose raw inputs are FLOAT64 columns of `schema`
// (named after them) plus, sometimes, the STRING column through one-hot.
ModelPipeline random_model(Rng& rng, const Schema& schema, const ModelShape& shape);
ModelPipeline random_tree_model(Rng& rng, const Schema& schema, const ModelShape& shape);

// A conjunction of 1-3 terms over `schema`; some terms are disjunctions,
// negations or column-column comparisons that yield no domain facts.
Expr random_predicate(Rng& rng, const Schema& schema);

// Interval facts on a random subset of the model's FLOAT64 raw inputs.
DomainConstraints random_domain(Rng& rng, const ModelPipeline& m);
// A row over the model's raw inputs satisfying every fact in `d`, biased
// toward interval endpoints and split thresholds.
RowBinding conforming_row(Rng& rng, const ModelPipeline& m, const DomainConstraints& d);

struct RandomPipeline {
  std::string table_name = "t";
  Table table;
  std::shared_ptr<const ModelPipeline> model;
  Plan plan;
};

// Scan -> [Featurize] -> [Filter] -> Predict -> Project over a fresh table.
RandomPipeline random_pipeline(Rng& rng, size_t rows, const ModelShape& shape);

}  // namespace inferq::testing

#endif  // INFERQ_TESTS_SUPPORT_GENERATORS_H_
