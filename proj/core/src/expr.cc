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

#include "inferq/expr.h"

#include <cmath>

#include "inferq/error.h"

namespace inferq {

std::string_view op_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "!=";
  }
  return "?";
}

std::string_view op_symbol(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return "+";
    case ArithOp::kSub: return "-";
    case ArithOp::kMul: return "*";
    case ArithOp::kDiv: return "/";
  }
  return "?";
}

CmpOp flip(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return CmpOp::kGt;
    case CmpOp::kLe: return CmpOp::kGe;
    case CmpOp::kGt: return CmpOp::kLt;
    case CmpOp::kGe: return CmpOp::kLe;
    default: return op;
  }
}

namespace {

bool literal_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* da = std::get_if<double>(&a)) {
    // Bitwise: -0.0 and 0.0 literals are distinct.
    return std::signbit(*da) == std::signbit(std::get<double>(b)) &&
           *da == std::get<double>(b);
  }
  return a == b;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  const auto& a = node_->v;
  const auto& b = other.node_->v;
  if (a.index() != b.index()) return false;
  return std::visit(
      Overloaded{
          [&](const ColumnRef& x) { return x.name == std::get<ColumnRef>(b).name; },
          [&](const Literal& x) {
            return literal_equal(x.value, std::get<Literal>(b).value);
          },
          [&](const Compare& x) {
            const auto& y = std::get<Compare>(b);
            return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const Arith& x) {
            const auto& y = std::get<Arith>(b);
            return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const BoolOp& x) {
            const auto& y = std::get<BoolOp>(b);
            return x.op == y.op && x.operands == y.operands;
          },
          [&](const Case& x) {
            const auto& y = std::get<Case>(b);
            if (x.branches.size() != y.branches.size()) return false;
            for (size_t i = 0; i < x.branches.size(); ++i) {
              if (!(x.branches[i].condition == y.branches[i].condition) ||
                  !(x.branches[i].result == y.branches[i].result)) {
                return false;
              }
            }
            return x.otherwise == y.otherwise;
          },
          [&](const Call& x) {
            const auto& y = std::get<Call>(b);
            return x.fn == y.fn && x.arg == y.arg;
          },
      },
      a);
}

namespace ex {

namespace {
Expr make(ExprNode node) {
  return Expr(std::make_shared<const ExprNode>(std::move(node)));
}
}  // namespace

Expr col(std::string name) { return make({ColumnRef{std::move(name)}}); }
Expr lit(Value value) { return make({Literal{std::move(value)}}); }
Expr cmp(CmpOp op, Expr lhs, Expr rhs) {
  return make({Compare{op, std::move(lhs), std::move(rhs)}});
}
Expr arith(ArithOp op, Expr lhs, Expr rhs) {
  return make({Arith{op, std::move(lhs), std::move(rhs)}});
}
Expr and_(std::vector<Expr> operands) {
  return make({BoolOp{BoolOpKind::kAnd, std::move(operands)}});
}
Expr or_(std::vector<Expr> operands) {
  return make({BoolOp{BoolOpKind::kOr, std::move(operands)}});
}
Expr not_(Expr operand) { return make({BoolOp{BoolOpKind::kNot, {std::move(operand)}}}); }
Expr case_(std::vector<CaseBranch> branches, Expr otherwise) {
  return make({Case{std::move(branches), std::move(otherwise)}});
}
Expr sigmoid(Expr arg) { return make({Call{Func::kSigmoid, std::move(arg)}}); }

}  // namespace ex

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

[[noreturn]] void mismatch(const std::string& what, const Expr& e) {
  throw Error(ErrorCode::kTypeMismatch, what + " in '" + to_string(e) + "'");
}

}  // namespace

DataType type_check(const Expr& e, const Schema& schema) {
  return std::visit(
      Overloaded{
          [&](const ColumnRef& x) { return schema.field(x.name, "expression").type; },
          [&](const Literal& x) { return type_of(x.value); },
          [&](const Compare& x) {
            DataType l = type_check(x.lhs, schema);
            DataType r = type_check(x.rhs, schema);
            if (is_numeric(l) && is_numeric(r)) return DataType::kBool;
            if (l != r) mismatch("cannot compare " + std::string(type_name(l)) + " with " +
                                     std::string(type_name(r)),
                                 e);
            if (x.op != CmpOp::kEq && x.op != CmpOp::kNe) {
              mismatch(std::string(type_name(l)) + " supports only = and !=", e);
            }
            return DataType::kBool;
          },
          [&](const Arith& x) {
            DataType l = type_check(x.lhs, schema);
            DataType r = type_check(x.rhs, schema);
            if (!is_numeric(l) || !is_numeric(r)) mismatch("arithmetic on non-numeric operand", e);
            return (l == DataType::kInt64 && r == DataType::kInt64) ? DataType::kInt64
                                                                    : DataType::kFloat64;
          },
          [&](const BoolOp& x) {
            if (x.operands.empty() || (x.op == BoolOpKind::kNot && x.operands.size() != 1)) {
              mismatch("malformed boolean operator", e);
            }
            for (const auto& o : x.operands) {
              if (type_check(o, schema) != DataType::kBool) mismatch("non-BOOL operand", e);
            }
            return DataType::kBool;
          },
          [&](const Case& x) {
            if (x.branches.empty()) mismatch("CASE without branches", e);
            DataType result = type_check(x.otherwise, schema);
            for (const auto& b : x.branches) {
              if (type_check(b.condition, schema) != DataType::kBool) {
                mismatch("non-BOOL CASE condition", e);
              }
              if (type_check(b.result, schema) != result) mismatch("CASE results differ in type", e);
            }
            return result;
          },
          [&](const Call& x) {
            if (!is_numeric(type_check(x.arg, schema))) mismatch("SIGMOID of non-numeric", e);
            return DataType::kFloat64;
          },
      },
      e.node().v);
}

namespace {

int64_t wrap_int(ArithOp op, int64_t a, int64_t b) {
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

double float_arith(ArithOp op, double a, double b) {
  switch (op) {
    case ArithOp::kAdd: return a + b;
    case ArithOp::kSub: return a - b;
    case ArithOp::kMul: return a * b;
    case ArithOp::kDiv:
      if (b == 0.0) throw Error(ErrorCode::kDivisionByZero, "division by 0.0");
      return a / b;
  }
  return 0.0;
}

template <class T>
bool compare_ordered(CmpOp op, const T& a, const T& b) {
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

bool as_bool(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw Error(ErrorCode::kTypeMismatch, "expected BOOL value");
}

}  // namespace

Value eval_expr(const Expr& e, const RowBinding& row) {
  return std::visit(
      Overloaded{
          [&](const ColumnRef& x) -> Value {
            auto it = row.find(x.name);
            if (it == row.end()) {
              throw Error(ErrorCode::kUnknownColumn, "column '" + x.name + "' is not bound");
            }
            return it->second;
          },
          [&](const Literal& x) -> Value { return x.value; },
          [&](const Compare& x) -> Value {
            Value l = eval_expr(x.lhs, row);
            Value r = eval_expr(x.rhs, row);
            if (type_of(l) == DataType::kInt64 && type_of(r) == DataType::kInt64) {
              return compare_ordered(x.op, std::get<int64_t>(l), std::get<int64_t>(r));
            }
            if (is_numeric(type_of(l)) && is_numeric(type_of(r))) {
              return compare_ordered(x.op, as_double(l), as_double(r));
            }
            if (l.index() != r.index()) mismatch("comparison of incompatible values", e);
            if (x.op == CmpOp::kEq) return l == r;
            if (x.op == CmpOp::kNe) return l != r;
            mismatch("ordering comparison on non-numeric values", e);
          },
          [&](const Arith& x) -> Value {
            Value l = eval_expr(x.lhs, row);
            Value r = eval_expr(x.rhs, row);
            if (type_of(l) == DataType::kInt64 && type_of(r) == DataType::kInt64) {
              return wrap_int(x.op, std::get<int64_t>(l), std::get<int64_t>(r));
            }
            return float_arith(x.op, as_double(l), as_double(r));
          },
          [&](const BoolOp& x) -> Value {
            switch (x.op) {
              case BoolOpKind::kNot: return !as_bool(eval_expr(x.operands.at(0), row));
              case BoolOpKind::kAnd:
                for (const auto& o : x.operands) {
                  if (!as_bool(eval_expr(o, row))) return false;
                }
                return true;
              case BoolOpKind::kOr:
                for (const auto& o : x.operands) {
                  if (as_bool(eval_expr(o, row))) return true;
                }
                return false;
            }
            return false;
          },
          [&](const Case& x) -> Value {
            for (const auto& b : x.branches) {
              if (as_bool(eval_expr(b.condition, row))) return eval_expr(b.result, row);
            }
            return eval_expr(x.otherwise, row);
          },
          [&](const Call& x) -> Value { return sigmoid(as_double(eval_expr(x.arg, row))); },
      },
      e.node().v);
}

namespace {

constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecNot = 3;
constexpr int kPrecCmp = 4;
constexpr int kPrecAdd = 5;
constexpr int kPrecMul = 6;
constexpr int kPrecAtom = 7;

int precedence(const Expr& e) {
  return std::visit(Overloaded{
                        [](const Compare&) { return kPrecCmp; },
                        [](const Arith& a) {
                          return (a.op == ArithOp::kAdd || a.op == ArithOp::kSub) ? kPrecAdd
                                                                                  : kPrecMul;
                        },
                        [](const BoolOp& b) {
                          return b.op == BoolOpKind::kOr    ? kPrecOr
                                 : b.op == BoolOpKind::kAnd ? kPrecAnd
                                                            : kPrecNot;
                        },
                        [](const Literal& l) {
                          // A negative literal reads as unary minus.
                          const Value& v = l.value;
                          if (const auto* d = std::get_if<double>(&v); d && std::signbit(*d)) {
                            return kPrecMul;
                          }
                          if (const auto* i = std::get_if<int64_t>(&v); i && *i < 0) return kPrecMul;
                          return kPrecAtom;
                        },
                        [](const auto&) { return kPrecAtom; },
                    },
                    e.node().v);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
  std::visit(
      Overloaded{
          [&](const ColumnRef& x) { out += x.name; },
          [&](const Literal& x) { out += format_value(x.value); },
          [&](const Compare& x) {
            print_wrapped(x.lhs, precedence(x.lhs) <= kPrecCmp, out);
            out += ' ';
            out += op_symbol(x.op);
            out += ' ';
            print_wrapped(x.rhs, precedence(x.rhs) <= kPrecCmp, out);
          },
          [&](const Arith& x) {
            const int p = precedence(e);
            print_wrapped(x.lhs, precedence(x.lhs) < p, out);
            out += ' ';
            out += op_symbol(x.op);
            out += ' ';
            print_wrapped(x.rhs, precedence(x.rhs) <= p, out);
          },
          [&](const BoolOp& x) {
            if (x.op == BoolOpKind::kNot) {
              out += "NOT ";
              print_wrapped(x.operands[0], precedence(x.operands[0]) < kPrecNot, out);
              return;
            }
            const int p = precedence(e);
            for (size_t i = 0; i < x.operands.size(); ++i) {
              if (i > 0) out += x.op == BoolOpKind::kAnd ? " AND " : " OR ";
              print_wrapped(x.operands[i], precedence(x.operands[i]) <= p, out);
            }
          },
          [&](const Case& x) {
            out += "CASE";
            for (const auto& b : x.branches) {
              out += " WHEN ";
              print(b.condition, out);
              out += " THEN ";
              print(b.result, out);
            }
            out += " ELSE ";
            print(x.otherwise, out);
            out += " END";
          },
          [&](const Call& x) {
            out += "SIGMOID(";
            print(x.arg, out);
            out += ')';
          },
      },
      e.node().v);
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

void collect_columns(const Expr& e, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const ColumnRef& x) { out.insert(x.name); },
                 [&](const Literal&) {},
                 [&](const Compare& x) {
                   collect_columns(x.lhs, out);
                   collect_columns(x.rhs, out);
                 },
                 [&](const Arith& x) {
                   collect_columns(x.lhs, out);
                   collect_columns(x.rhs, out);
                 },
                 [&](const BoolOp& x) {
                   for (const auto& o : x.operands) collect_columns(o, out);
                 },
                 [&](const Case& x) {
                   for (const auto& b : x.branches) {
                     collect_columns(b.condition, out);
                     collect_columns(b.result, out);
                   }
                   collect_columns(x.otherwise, out);
                 },
                 [&](const Call& x) { collect_columns(x.arg, out); },
             },
             e.node().v);
}

std::set<std::string> referenced_columns(const Expr& e) {
  std::set<std::string> out;
  collect_columns(e, out);
  return out;
}

std::vector<Expr> conjuncts(const Expr& e) {
  std::vector<Expr> out;
  const auto* b = std::get_if<BoolOp>(&e.node().v);
  if (b == nullptr || b->op != BoolOpKind::kAnd) {
    out.push_back(e);
    return out;
  }
  for (const auto& o : b->operands) {
    auto sub = conjuncts(o);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

size_t expr_size(const Expr& e) {
  return std::visit(Overloaded{
                        [](const ColumnRef&) -> size_t { return 1; },
                        [](const Literal&) -> size_t { return 1; },
                        [](const Compare& x) { return 1 + expr_size(x.lhs) + expr_size(x.rhs); },
                        [](const Arith& x) { return 1 + expr_size(x.lhs) + expr_size(x.rhs); },
                        [](const BoolOp& x) {
                          size_t n = 1;
                          for (const auto& o : x.operands) n += expr_size(o);
                          return n;
                        },
                        [](const Case& x) {
                          size_t n = 1 + expr_size(x.otherwise);
                          for (const auto& b : x.branches) {
                            n += expr_size(b.condition) + expr_size(b.result);
                          }
                          return n;
                        },
                        [](const Call& x) { return 1 + expr_size(x.arg); },
                    },
                    e.node().v);
}

}  // namespace inferq
