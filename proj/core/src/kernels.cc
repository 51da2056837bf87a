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

#include "inferq/kernels.h"

#include <unordered_map>

#include "inferq/error.h"

namespace inferq {

namespace {

int64_t int_arith(ArithOp op, int64_t a, int64_t b) {
  const auto ua = static_cast<uint64_t>(a);
  const auto ub = static_cast<uint64_t>(b);
  switch (op) {
    case ArithOp::kAdd: return static_cast<int64_t>(ua + ub);
    case ArithOp::kSub: return static_cast<int64_t>(ua - ub);
    case ArithOp::kMul: return static_cast<int64_t>(ua * ub);
    case ArithOp::kDiv:
      if (b == 0) throw Error(ErrorCode::kDivisionByZero, "integer division by zero");
      if (b == -1) return static_cast<int64_t>(0 - ua);
      return a / b;
  }
  return 0;
}

template <class T>
bool ordered(CmpOp op, const T& a, const T& b) {
  switch (op) {
    case CmpOp::kLt: return a < b;
    case CmpOp::kLe: return a <= b;
    case CmpOp::kGt: return a > b;
    case CmpOp::kGe: return a >= b;
    case CmpOp::kEq: return a == b;
    case CmpOp::kNe: return a != b;
  }
  return false;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, const Schema& schema) {
  type_check(e, schema);
  root_ = compile(e, schema);
}

int CompiledExpr::compile(const Expr& e, const Schema& schema) {
  Node node;
  node.type = type_check(e, schema);
  std::visit(Overloaded{
                 [&](const ColumnRef& x) {
                   node.kind = Kind::kColumn;
                   node.column = static_cast<int>(*schema.index_of(x.name));
                 },
                 [&](const Literal& x) {
                   node.kind = Kind::kLiteral;
                   node.literal = x.value;
                   if (is_numeric(type_of(x.value))) node.literal_double = as_double(x.value);
                 },
                 [&](const Compare& x) {
                   node.kind = Kind::kCompare;
                   node.cmp = x.op;
                   node.children = {compile(x.lhs, schema), compile(x.rhs, schema)};
                 },
                 [&](const Arith& x) {
                   node.kind = Kind::kArith;
                   node.arith = x.op;
                   node.children = {compile(x.lhs, schema), compile(x.rhs, schema)};
                 },
                 [&](const BoolOp& x) {
                   node.kind = x.op == BoolOpKind::kAnd  ? Kind::kAnd
                               : x.op == BoolOpKind::kOr ? Kind::kOr
                                                         : Kind::kNot;
                   for (const auto& o : x.operands) node.children.push_back(compile(o, schema));
                 },
                 [&](const Case& x) {
                   node.kind = Kind::kCase;
                   for (const auto& br : x.branches) {
                     node.children.push_back(compile(br.condition, schema));
                     node.children.push_back(compile(br.result, schema));
                   }
                   node.children.push_back(compile(x.otherwise, schema));
                 },
                 [&](const Call& x) {
                   node.kind = Kind::kSigmoid;
                   node.children = {compile(x.arg, schema)};
                 },
             },
             e.node().v);
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size() - 1);
}

int CompiledExpr::case_branch(const Node& node, const Batch& b, size_t row) const {
  const size_t n = node.children.size();
  for (size_t i = 0; i + 1 < n; i += 2) {
    if (boolean(node.children[i], b, row)) return node.children[i + 1];
  }
  return node.children[n - 1];
}

double CompiledExpr::number(int n, const Batch& b, size_t row) const {
  const Node& node = nodes_[n];
  if (node.type == DataType::kInt64) return static_cast<double>(integer(n, b, row));
  switch (node.kind) {
    case Kind::kColumn: return std::get<1>(b.columns[node.column])[row];
    case Kind::kLiteral: return node.literal_double;
    case Kind::kArith: {
      const double l = number(node.children[0], b, row);
      const double r = number(node.children[1], b, row);
      switch (node.arith) {
        case ArithOp::kAdd: return l + r;
        case ArithOp::kSub: return l - r;
        case ArithOp::kMul: return l * r;
        case ArithOp::kDiv:
          if (r == 0.0) throw Error(ErrorCode::kDivisionByZero, "division by 0.0");
          return l / r;
      }
      return 0.0;
    }
    case Kind::kCase: return number(case_branch(node, b, row), b, row);
    case Kind::kSigmoid: return sigmoid(number(node.children[0], b, row));
    default: throw Error(ErrorCode::kTypeMismatch, "non-numeric expression node");
  }
}

int64_t CompiledExpr::integer(int n, const Batch& b, size_t row) const {
  const Node& node = nodes_[n];
  switch (node.kind) {
    case Kind::kColumn: return std::get<0>(b.columns[node.column])[row];
    case Kind::kLiteral: return std::get<int64_t>(node.literal);
    case Kind::kArith:
      return int_arith(node.arith, integer(node.children[0], b, row),
                       integer(node.children[1], b, row));
    case Kind::kCase: return integer(case_branch(node, b, row), b, row);
    default: throw Error(ErrorCode::kTypeMismatch, "non-integer expression node");
  }
}

std::string_view CompiledExpr::string(int n, const Batch& b, size_t row) const {
  const Node& node = nodes_[n];
  switch (node.kind) {
    case Kind::kColumn: return std::get<3>(b.columns[node.column])[row];
    case Kind::kLiteral: return std::get<std::string>(node.literal);
    case Kind::kCase: return string(case_branch(node, b, row), b, row);
    default: throw Error(ErrorCode::kTypeMismatch, "non-string expression node");
  }
}

bool CompiledExpr::boolean(int n, const Batch& b, size_t row) const {
  const Node& node = nodes_[n];
  switch (node.kind) {
    case Kind::kColumn: return std::get<2>(b.columns[node.column])[row] != 0;
    case Kind::kLiteral: return std::get<bool>(node.literal);
    case Kind::kCompare: {
      const int l = node.children[0];
      const int r = node.children[1];
      const DataType lt = nodes_[l].type;
      const DataType rt = nodes_[r].type;
      if (lt == DataType::kInt64 && rt == DataType::kInt64) {
        const int64_t a = integer(l, b, row);
        return ordered(node.cmp, a, integer(r, b, row));
      }
      if (is_numeric(lt)) {
        const double a = number(l, b, row);
        return ordered(node.cmp, a, number(r, b, row));
      }
      if (lt == DataType::kString) {
        const std::string_view a = string(l, b, row);
        return ordered(node.cmp, a, string(r, b, row));
      }
      const bool a = boolean(l, b, row);
      return ordered(node.cmp, a, boolean(r, b, row));
    }
    case Kind::kAnd:
      for (int c : node.children) {
        if (!boolean(c, b, row)) return false;
      }
      return true;
    case Kind::kOr:
      for (int c : node.children) {
        if (boolean(c, b, row)) return true;
      }
      return false;
    case Kind::kNot: return !boolean(node.children[0], b, row);
    case Kind::kCase: return boolean(case_branch(node, b, row), b, row);
    default: throw Error(ErrorCode::kTypeMismatch, "non-boolean expression node");
  }
}

Value CompiledExpr::eval(const Batch& b, size_t row) const {
  switch (type()) {
    case DataType::kInt64: return integer(root_, b, row);
    case DataType::kFloat64: return number(root_, b, row);
    case DataType::kBool: return boolean(root_, b, row);
    case DataType::kString: return std::string(string(root_, b, row));
  }
  return {};
}

Column CompiledExpr::eval_column(const Batch& b) const {
  const size_t n = b.size();
  switch (type()) {
    case DataType::kInt64: {
      std::vector<int64_t> out(n);
      for (size_t i = 0; i < n; ++i) out[i] = integer(root_, b, i);
      return out;
    }
    case DataType::kFloat64: {
      std::vector<double> out(n);
      for (size_t i = 0; i < n; ++i) out[i] = number(root_, b, i);
      return out;
    }
    case DataType::kBool: {
      std::vector<uint8_t> out(n);
      for (size_t i = 0; i < n; ++i) out[i] = boolean(root_, b, i) ? 1 : 0;
      return out;
    }
    case DataType::kString: {
      std::vector<std::string> out(n);
      for (size_t i = 0; i < n; ++i) out[i] = std::string(string(root_, b, i));
      return out;
    }
  }
  return std::vector<double>{};
}

CompiledModel::CompiledModel(std::shared_ptr<const ModelPipeline> model) : model_(std::move(model)) {
  const ModelPipeline& m = *model_;
  std::unordered_map<std::string, int> slot;
  std::unordered_map<std::string, int> string_raw;
  for (size_t i = 0; i < m.raw_inputs.size(); ++i) {
    const auto& in = m.raw_inputs[i];
    if (in.type == DataType::kFloat64) {
      slot[in.name] = num_slots_;
      raw_slot_.push_back(num_slots_++);
    } else {
      string_raw[in.name] = static_cast<int>(i);
      raw_slot_.push_back(-1);
    }
  }
  for (const auto& t : m.featurizers) {
    FeatStep step;
    step.one_hot = std::holds_alternative<OneHot>(t);
    step.input = step.one_hot ? string_raw.at(transform_input(t)) : slot.at(transform_input(t));
    for (const auto& out : transform_outputs(t)) {
      slot[out] = num_slots_;
      step.outputs.push_back(num_slots_++);
    }
    feats_.push_back(std::move(step));
  }
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    for (size_t i = 0; i < lin->inputs.size(); ++i) {
      if (lin->weights[i] == 0.0) continue;
      linear_slots_.push_back(slot.at(lin->inputs[i]));
      linear_weights_.push_back(lin->weights[i]);
    }
    return;
  }
  for (const auto& tree : std::get<TreeEnsemble>(m.core).trees) {
    std::vector<FlatNode> flat;
    // Preorder layout; children indices patched after recursion.
    auto emit = [&](auto&& self, const TreeNode& n) -> int {
      const int idx = static_cast<int>(flat.size());
      flat.push_back({n.is_leaf() ? -1 : slot.at(n.feature), n.threshold, n.value, -1, -1});
      if (!n.is_leaf()) {
        const int l = self(self, *n.left);
        const int r = self(self, *n.right);
        flat[idx].left = l;
        flat[idx].right = r;
      }
      return idx;
    };
    emit(emit, *tree);
    trees_.push_back(std::move(flat));
  }
}

std::vector<double> CompiledModel::predict(std::span<const Column* const> raw, size_t rows) const {
  const ModelPipeline& m = *model_;
  if (raw.size() != m.raw_inputs.size()) {
    throw Error(ErrorCode::kMissingFeature, "model '" + m.name + "' expects " +
                                                std::to_string(m.raw_inputs.size()) + " inputs");
  }
  std::vector<const double*> slots(num_slots_, nullptr);
  for (size_t i = 0; i < raw.size(); ++i) {
    const DataType want = m.raw_inputs[i].type;
    if (raw[i] == nullptr || column_type(*raw[i]) != want || column_size(*raw[i]) < rows) {
      throw Error(ErrorCode::kMissingFeature,
                  "input '" + m.raw_inputs[i].name + "' missing or not " +
                      std::string(type_name(want)));
    }
    if (raw_slot_[i] >= 0) slots[raw_slot_[i]] = std::get<1>(*raw[i]).data();
  }
  std::vector<std::vector<double>> owned;
  owned.reserve(num_slots_);
  for (size_t f = 0; f < feats_.size(); ++f) {
    const FeatStep& step = feats_[f];
    if (step.one_hot) {
      const auto& oh = std::get<OneHot>(m.featurizers[f]);
      const auto& col = std::get<3>(*raw[step.input]);
      for (size_t k = 0; k < oh.categories.size(); ++k) {
        std::vector<double> out(rows);
        for (size_t i = 0; i < rows; ++i) out[i] = col[i] == oh.categories[k] ? 1.0 : 0.0;
        owned.push_back(std::move(out));
        slots[step.outputs[k]] = owned.back().data();
      }
    } else {
      const auto& sc = std::get<Scale>(m.featurizers[f]);
      const double* x = slots[step.input];
      std::vector<double> out(rows);
      for (size_t i = 0; i < rows; ++i) out[i] = (x[i] - sc.mean) / sc.stddev;
      owned.push_back(std::move(out));
      slots[step.outputs[0]] = owned.back().data();
    }
  }

  std::vector<double> out(rows);
  Link link;
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    link = lin->link;
    for (size_t i = 0; i < rows; ++i) out[i] = lin->intercept;
    for (size_t k = 0; k < linear_slots_.size(); ++k) {
      const double w = linear_weights_[k];
      const double* x = slots[linear_slots_[k]];
      for (size_t i = 0; i < rows; ++i) out[i] = out[i] + w * x[i];
    }
  } else {
    const auto& ens = std::get<TreeEnsemble>(m.core);
    link = ens.link;
    for (size_t t = 0; t < trees_.size(); ++t) {
      const FlatNode* nodes = trees_[t].data();
      for (size_t i = 0; i < rows; ++i) {
        const FlatNode* n = nodes;
        while (n->slot >= 0) n = nodes + (slots[n->slot][i] < n->threshold ? n->left : n->right);
        out[i] = t == 0 ? n->value : out[i] + n->value;
      }
    }
    if (ens.aggregate == Aggregate::kAvg) {
      const double count = static_cast<double>(trees_.size());
      for (size_t i = 0; i < rows; ++i) out[i] = out[i] / count;
    }
  }
  if (link == Link::kSigmoid) {
    for (size_t i = 0; i < rows; ++i) out[i] = sigmoid(out[i]);
  }
  return out;
}

std::vector<double> predict_vector(const ModelPipeline& m, const Batch& batch) {
  std::vector<const Column*> raw;
  for (const auto& in : m.raw_inputs) {
    auto idx = batch.schema.index_of(in.name);
    if (!idx) {
      throw Error(ErrorCode::kMissingFeature, "batch lacks model input '" + in.name + "'");
    }
    raw.push_back(&batch.columns[*idx]);
  }
  CompiledModel compiled(std::make_shared<const ModelPipeline>(m));
  return compiled.predict(raw, batch.size());
}

}  // namespace inferq
