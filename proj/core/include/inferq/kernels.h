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

#ifndef INFERQ_KERNELS_H_
#define INFERQ_KERNELS_H_

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "inferq/expr.h"
#include "inferq/model.h"
#include "inferq/table.h"

namespace inferq {

// Expression resolved against a schema for row-at-a-time evaluation over
// batches. Produces bit-identical results to eval_expr.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& e, const Schema& schema);

  DataType type() const { return nodes_[root_].type; }

  bool eval_bool(const Batch& b, size_t row) const { return boolean(root_, b, row); }
  double eval_double(const Batch& b, size_t row) const { return number(root_, b, row); }
  Value eval(const Batch& b, size_t row) const;
  // Evaluates every row of `b` into a fresh column of type().
  Column eval_column(const Batch& b) const;

 private:
  enum class Kind { kColumn, kLiteral, kCompare, kArith, kAnd, kOr, kNot, kCase, kSigmoid };
  struct Node {
    Kind kind;
    DataType type;
    int column = -1;
    Value literal;
    double literal_double = 0.0;
    CmpOp cmp = CmpOp::kEq;
    ArithOp arith = ArithOp::kAdd;
    std::vector<int> children;  // CASE: cond, result, cond, result, ..., else
  };

  int compile(const Expr& e, const Schema& schema);

  double number(int n, const Batch& b, size_t row) const;
  int64_t integer(int n, const Batch& b, size_t row) const;
  bool boolean(int n, const Batch& b, size_t row) const;
  std::string_view string(int n, const Batch& b, size_t row) const;
  // Index of the taken CASE result child.
  int case_branch(const Node& node, const Batch& b, size_t row) const;

  std::vector<Node> nodes_;
  int root_ = -1;
};

// Columnar scorer for one model. Evaluation order inside each row matches
// eval_model, so results are bit-identical.
class CompiledModel {
 public:
  explicit CompiledModel(std::shared_ptr<const ModelPipeline> model);

  const ModelPipeline& model() const { return *model_; }

  // `raw[i]` supplies the model's i-th raw input.
  std::vector<double> predict(std::span<const Column* const> raw, size_t rows) const;

 private:
  struct FlatNode {
    int slot;  // -1 for leaves
    double threshold;
    double value;
    int left, right;
  };

  std::shared_ptr<const ModelPipeline> model_;
  std::vector<int> raw_slot_;  // slot per raw input (-1 for STRING)
  int num_slots_ = 0;
  std::vector<std::vector<FlatNode>> trees_;
  std::vector<int> linear_slots_;
  std::vector<double> linear_weights_;
  // Per featurizer: input slot (numeric) or raw index (string), output slots.
  struct FeatStep {
    bool one_hot;
    int input;
    std::vector<int> outputs;
  };
  std::vector<FeatStep> feats_;
};

// VECTOR strategy kernel: scores every row of `batch`, whose columns are
// looked up by raw input name. Throws MissingFeature.
std::vector<double> predict_vector(const ModelPipeline& m, const Batch& batch);

}  // namespace inferq

#endif  // INFERQ_KERNELS_H_
