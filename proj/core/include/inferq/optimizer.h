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

#ifndef INFERQ_OPTIMIZER_H_
#define INFERQ_OPTIMIZER_H_

#include <map>
#include <string>
#include <vector>

#include "inferq/domain.h"
#include "inferq/expr.h"
#include "inferq/plan.h"
#include "inferq/stats.h"

namespace inferq {

struct OptimizerConfig {
  bool pruning = true;
  bool projection_pushdown = true;
  bool clustering = true;
  bool inlining = true;
  bool physical_selection = true;
  int64_t inline_max_nodes = 64;
  int64_t cluster_max_partitions = 8;
  double cluster_benefit_threshold = 0.6;
  double k_vec = 0.25;
  double vector_batch_overhead = 1000.0;

  static OptimizerConfig none();
};

// Throws ValidationError on out-of-range settings.
void validate_config(const OptimizerConfig& config);

struct CostEstimate {
  double rows = 0.0;
  double ops_per_row = 0.0;
  double overhead = 0.0;
  double total = 0.0;
};

CostEstimate inline_cost(double rows, double ops);
CostEstimate vector_cost(double rows, double ops, const OptimizerConfig& config);
// INLINE only when strictly cheaper.
Strategy pick_strategy(double rows, double ops, const OptimizerConfig& config);

// Facts implied by the top-level conjuncts of `predicate`. Throws
// UnsatisfiablePredicate when they contradict each other.
DomainConstraints derive_domain(const Expr& predicate);

using StatsMap = std::map<std::string, TableStats>;

// Individual rules. Each applies one pass and appends a line to `log` for
// every rewrite it performs; a plan returned unchanged is the same handle.
Plan rule_predicate_model_pruning(const Plan& plan, std::vector<std::string>* log);
Plan rule_projection_pushdown(const Plan& plan, std::vector<std::string>* log);
Plan rule_model_clustering(const Plan& plan, const StatsMap& stats, const OptimizerConfig& config,
                           std::vector<std::string>* log);
Plan rule_model_inlining(const Plan& plan, const OptimizerConfig& config,
                         std::vector<std::string>* log);
// Assigns a strategy to every Predict. Without stats for the scanned table
// the strategy is VECTOR.
Plan choose_physical(const Plan& plan, const StatsMap& stats, const OptimizerConfig& config,
                     std::vector<std::string>* log);

struct OptimizeResult {
  Plan plan;
  std::vector<std::string> rewrites;
};

// Runs the enabled rules in a fixed order, each to a fixpoint, then assigns
// strategies. Unbound models are resolved through `lookup` first.
OptimizeResult optimize(const Plan& plan, const StatsMap& stats, const OptimizerConfig& config,
                        const ModelLookup& lookup = nullptr);

// Plan explain text followed by the `-- rewrites:` section.
std::string explain(const OptimizeResult& result);

// Sum of node_count over every model a plan references.
size_t total_model_nodes(const Plan& plan);

}  // namespace inferq

#endif  // INFERQ_OPTIMIZER_H_
