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

#ifndef INFERQ_MODEL_H_
#define INFERQ_MODEL_H_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "inferq/domain.h"
#include "inferq/expr.h"
#include "inferq/value.h"

namespace inferq {

enum class Link { kIdentity, kSigmoid };
enum class Aggregate { kSum, kAvg };

struct TreeNode;
using TreePtr = std::shared_ptr<const TreeNode>;

// A split sends a row left iff feature < threshold. Leaves have no children.
struct TreeNode {
  std::string feature;
  double threshold = 0.0;
  TreePtr left;
  TreePtr right;
  double value = 0.0;

  bool is_leaf() const { return left == nullptr; }

  static TreePtr leaf(double value);
  static TreePtr split(std::string feature, double threshold, TreePtr left, TreePtr right);
};

bool tree_equal(const TreeNode& a, const TreeNode& b);
size_t tree_node_count(const TreeNode& t);
size_t tree_depth(const TreeNode& t);

struct LinearModel {
  std::vector<std::string> inputs;
  std::vector<double> weights;
  double intercept = 0.0;
  Link link = Link::kIdentity;
};

struct TreeEnsemble {
  std::vector<std::string> inputs;
  std::vector<TreePtr> trees;
  Aggregate aggregate = Aggregate::kSum;
  Link link = Link::kIdentity;
};

// Categorical indicator encoding; unseen categories encode as all zeros.
struct OneHot {
  std::string input;
  std::vector<std::string> categories;
  std::vector<std::string> outputs;
};

// (x - mean) / stddev
struct Scale {
  std::string input;
  double mean = 0.0;
  double stddev = 1.0;
  std::string output;
};

using Transform = std::variant<OneHot, Scale>;

const std::string& transform_input(const Transform& t);
std::vector<std::string> transform_outputs(const Transform& t);
DataType transform_input_type(const Transform& t);
std::string describe(const Transform& t);
bool transform_equal(const Transform& a, const Transform& b);

struct RawInput {
  std::string name;
  DataType type;

  bool operator==(const RawInput&) const = default;
};

using CoreModel = std::variant<LinearModel, TreeEnsemble>;

struct ModelPipeline {
  std::string name;
  std::vector<RawInput> raw_inputs;
  std::vector<Transform> featurizers;
  CoreModel core;

  bool is_linear() const { return std::holds_alternative<LinearModel>(core); }
  bool is_ensemble() const { return std::holds_alternative<TreeEnsemble>(core); }
  const std::vector<std::string>& core_inputs() const;
};

// Structural equality over every field, doubles compared bit-exactly.
bool model_equal(const ModelPipeline& a, const ModelPipeline& b);

// Throws ValidationError naming the offending field.
void validate_model(const ModelPipeline& m);

// Reference scorer: featurizers in order, then the core, then the link.
double eval_model(const ModelPipeline& m, const RowBinding& row);

// Raw inputs that can influence the output.
std::set<std::string> used_features(const ModelPipeline& m);

// Removes tree branches no row conforming to `d` can reach. `d` is keyed by
// raw input name; only core features bound directly to a FLOAT64 raw input
// are constrained.
ModelPipeline prune_with_domain(const ModelPipeline& m, const DomainConstraints& d);

// Drops raw inputs, featurizers and core inputs that cannot affect the output.
ModelPipeline drop_unused_inputs(const ModelPipeline& m);

// Relational form of the model. `bindings` maps raw input names to the
// expressions that supply them.
Expr inline_to_expr(const ModelPipeline& m, const std::map<std::string, Expr>& bindings);

// Split + leaf nodes across all trees; 0 for linear cores.
size_t node_count(const ModelPipeline& m);
// Deepest tree, counting a lone leaf as depth 1; 0 for linear cores.
size_t depth(const ModelPipeline& m);
// Per-row operation count used by the cost model.
size_t op_count(const ModelPipeline& m);

}  // namespace inferq

#endif  // INFERQ_MODEL_H_
