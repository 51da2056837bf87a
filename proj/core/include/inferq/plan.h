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

#ifndef INFERQ_PLAN_H_
#define INFERQ_PLAN_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "inferq/expr.h"
#include "inferq/model.h"
#include "inferq/value.h"

namespace inferq {

enum class Strategy { kInline, kVector };

std::string_view strategy_name(Strategy s);

// Catalog coordinates of a model. `variant` is non-empty for plan-local
// models derived by the optimizer (pruned, specialized, projected).
struct ModelRef {
  std::string name;
  int64_t version = 0;
  std::string variant;

  std::string to_string() const;
  bool operator==(const ModelRef&) const = default;
};

struct PlanNode;

// Immutable plan tree handle. Logical and physical plans share this type; a
// physical plan is one where every Predict carries a strategy.
class Plan {
 public:
  Plan() = default;
  explicit Plan(std::shared_ptr<const PlanNode> node) : node_(std::move(node)) {}

  const PlanNode& node() const { return *node_; }
  bool valid() const { return node_ != nullptr; }
  bool same(const Plan& other) const { return node_ == other.node_; }

  // Input of single-input nodes; an invalid Plan for Scan / RouteInput.
  Plan input() const;
  // Copy of this node over a different input.
  Plan with_input(Plan input) const;

 private:
  std::shared_ptr<const PlanNode> node_;
};

struct ScanNode {
  std::string table;
  std::vector<std::string> columns;
};

struct FilterNode {
  Plan input;
  Expr predicate;
};

struct ProjectItem {
  Expr expr;
  std::string name;
};

struct ProjectNode {
  Plan input;
  std::vector<ProjectItem> items;
};

// Appends the transform's output columns to its input.
struct FeaturizeNode {
  Plan input;
  Transform transform;
};

// Appends `output_column`; `input_columns[i]` feeds the model's i-th raw input.
struct PredictNode {
  Plan input;
  ModelRef ref;
  std::shared_ptr<const ModelPipeline> model;  // null until bound
  std::vector<std::string> input_columns;
  std::string output_column;
  std::optional<Strategy> strategy;
};

struct RouteCase {
  std::vector<Value> match;
  Plan continuation;  // leaf is RouteInput
};

// Sends each input row through the continuation of the first case whose
// match set contains the routing value, or through `fallback`. Output rows
// keep input order.
struct RouteUnionNode {
  Plan input;
  std::string routing_column;
  std::vector<RouteCase> cases;
  Plan fallback;
};

// Leaf of a RouteUnion continuation: the rows routed to that branch.
struct RouteInputNode {};

struct PlanNode {
  std::variant<ScanNode, FilterNode, ProjectNode, FeaturizeNode, PredictNode, RouteUnionNode,
               RouteInputNode>
      v;
};

namespace plan {
Plan scan(std::string table, std::vector<std::string> columns);
Plan filter(Plan input, Expr predicate);
Plan project(Plan input, std::vector<ProjectItem> items);
Plan featurize(Plan input, Transform transform);
Plan predict(Plan input, ModelRef ref, std::shared_ptr<const ModelPipeline> model,
             std::vector<std::string> input_columns, std::string output_column,
             std::optional<Strategy> strategy = std::nullopt);
Plan route_union(Plan input, std::string routing_column, std::vector<RouteCase> cases,
                 Plan fallback);
Plan route_input();
}  // namespace plan

using ModelLookup = std::function<std::shared_ptr<const ModelPipeline>(const ModelRef&)>;

// Type-checks every node and returns the output schema. Predicts without a
// bound model are resolved through `lookup`. Errors name the failing node.
Schema validate(const Plan& plan, const std::map<std::string, Schema>& tables,
                const ModelLookup& lookup = nullptr);

// Returns `plan` with every unbound Predict bound through `lookup`.
Plan bind_models(const Plan& plan, const ModelLookup& lookup);

// One node per line, two spaces of indentation per level.
std::string explain(const Plan& plan);
// The single explain line describing `plan`'s root node.
std::string node_label(const Plan& plan);

// Canonical full-detail text; structurally equal plans give equal text.
std::string fingerprint(const Plan& plan);

// Hex digest of the model's canonical document.
std::string model_digest(const ModelPipeline& m);

// Visits every node, including RouteUnion continuations, parents first.
void visit_plan(const Plan& plan, const std::function<void(const Plan&)>& fn);

// The Scan feeding a single-input chain, if any.
const ScanNode* find_scan(const Plan& plan);

}  // namespace inferq

#endif  // INFERQ_PLAN_H_
