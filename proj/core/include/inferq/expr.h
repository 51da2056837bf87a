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

#ifndef INFERQ_EXPR_H_
#define INFERQ_EXPR_H_

#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "inferq/value.h"

namespace inferq {

enum class CmpOp { kLt, kLe, kGt, kGe, kEq, kNe };
enum class ArithOp { kAdd, kSub, kMul, kDiv };
enum class BoolOpKind { kAnd, kOr, kNot };
enum class Func { kSigmoid };

std::string_view op_symbol(CmpOp op);
std::string_view op_symbol(ArithOp op);
// `a op b` is equivalent to `b flip(op) a`.
CmpOp flip(CmpOp op);

struct ExprNode;

// Immutable scalar expression. Copies share structure.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  const ExprNode& node() const { return *node_; }
  bool valid() const { return node_ != nullptr; }

  // Structural equality (literal values compared exactly, including type).
  bool operator==(const Expr& other) const;

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct ColumnRef {
  std::string name;
};
struct Literal {
  Value value;
};
struct Compare {
  CmpOp op;
  Expr lhs, rhs;
};
struct Arith {
  ArithOp op;
  Expr lhs, rhs;
};
struct BoolOp {
  BoolOpKind op;
  std::vector<Expr> operands;  // NOT has exactly one
};
struct CaseBranch {
  Expr condition;
  Expr result;
};
struct Case {
  std::vector<CaseBranch> branches;
  Expr otherwise;
};
struct Call {
  Func fn;
  Expr arg;
};

struct ExprNode {
  std::variant<ColumnRef, Literal, Compare, Arith, BoolOp, Case, Call> v;
};

namespace ex {
Expr col(std::string name);
Expr lit(Value value);
Expr cmp(CmpOp op, Expr lhs, Expr rhs);
Expr arith(ArithOp op, Expr lhs, Expr rhs);
Expr and_(std::vector<Expr> operands);
Expr or_(std::vector<Expr> operands);
Expr not_(Expr operand);
Expr case_(std::vector<CaseBranch> branches, Expr otherwise);
Expr sigmoid(Expr arg);
}  // namespace ex

// Numerically stable logistic function shared by every evaluator.
double sigmoid(double x);

// Returns the expression type; throws TypeMismatch / UnknownColumn.
DataType type_check(const Expr& e, const Schema& schema);

using RowBinding = std::unordered_map<std::string, Value>;

// Reference scalar evaluator. AND/OR short-circuit left to right; CASE
// evaluates only the taken branch.
Value eval_expr(const Expr& e, const RowBinding& row);

// Query-language spelling with minimal parentheses.
std::string to_string(const Expr& e);

void collect_columns(const Expr& e, std::set<std::string>& out);
std::set<std::string> referenced_columns(const Expr& e);

// Top-level AND operands (flattened); a non-AND expression yields itself.
std::vector<Expr> conjuncts(const Expr& e);

size_t expr_size(const Expr& e);

}  // namespace inferq

#endif  // INFERQ_EXPR_H_
