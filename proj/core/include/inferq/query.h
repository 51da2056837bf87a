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

#ifndef INFERQ_QUERY_H_
#define INFERQ_QUERY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "inferq/error.h"
#include "inferq/expr.h"
#include "inferq/model_source.h"
#include "inferq/plan.h"

namespace inferq {

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, std::set<std::string> expected, const std::string& found);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  int line_, column_;
  std::set<std::string> expected_;
};

struct PredictCall {
  std::string model;
  std::optional<int64_t> version;
  std::vector<std::string> args;

  bool operator==(const PredictCall&) const = default;
};

struct SelectItem {
  std::optional<PredictCall> predict;  // set for PREDICT items
  Expr expr;                           // set otherwise
  std::optional<std::string> alias;

  // Output column name: the alias or the bare column.
  std::string name() const;
  bool operator==(const SelectItem&) const = default;
};

struct QueryAst {
  std::vector<SelectItem> items;
  std::string table;
  std::optional<Expr> where;

  bool operator==(const QueryAst&) const = default;
};

QueryAst parse_query(std::string_view text);
// A standalone expression in the query language.
Expr parse_expression(std::string_view text);
std::string print_query(const QueryAst& ast);

// Canonical unoptimized plan: Scan -> Filter -> Predict -> Project.
Plan lower(const QueryAst& ast, const ModelSource& models,
           const std::map<std::string, Schema>& tables);

}  // namespace inferq

#endif  // INFERQ_QUERY_H_
