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

#include "inferq/plan.h"

#include <set>

#include "inferq/digest.h"
#include "inferq/error.h"
#include "inferq/model_io.h"

namespace inferq {

std::string_view strategy_name(Strategy s) {
  return s == Strategy::kInline ? "INLINE" : "VECTOR";
}

std::string ModelRef::to_string() const {
  std::string out = name + "@" + (version > 0 ? std::to_string(version) : std::string("latest"));
  if (!variant.empty()) out += "/" + variant;
  return out;
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Plan make(PlanNode node) { return Plan(std::make_shared<const PlanNode>(std::move(node))); }

std::string join(const std::vector<std::string>& xs, const char* sep = ",") {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += sep;
    out += xs[i];
  }
  return out;
}

}  // namespace

Plan Plan::input() const {
  return std::visit(Overloaded{
                        [](const ScanNode&) { return Plan(); },
                        [](const RouteInputNode&) { return Plan(); },
                        [](const auto& n) { return n.input; },
                    },
                    node_->v);
}

Plan Plan::with_input(Plan input) const {
  PlanNode copy = *node_;
  std::visit(Overloaded{
                 [](ScanNode&) {},
                 [](RouteInputNode&) {},
                 [&](auto& n) { n.input = std::move(input); },
             },
             copy.v);
  return make(std::move(copy));
}

namespace plan {
Plan scan(std::string table, std::vector<std::string> columns) {
  return make({ScanNode{std::move(table), std::move(columns)}});
}
Plan filter(Plan input, Expr predicate) {
  return make({FilterNode{std::move(input), std::move(predicate)}});
}
Plan project(Plan input, std::vector<ProjectItem> items) {
  return make({ProjectNode{std::move(input), std::move(items)}});
}
Plan featurize(Plan input, Transform transform) {
  return make({FeaturizeNode{std::move(input), std::move(transform)}});
}
Plan predict(Plan input, ModelRef ref, std::shared_ptr<const ModelPipeline> model,
             std::vector<std::string> input_columns, std::string output_column,
             std::optional<Strategy> strategy) {
  return make({PredictNode{std::move(input), std::move(ref), std::move(model),
                           std::move(input_columns), std::move(output_column), strategy}});
}
Plan route_union(Plan input, std::string routing_column, std::vector<RouteCase> cases,
                 Plan fallback) {
  return make({RouteUnionNode{std::move(input), std::move(routing_column), std::move(cases),
                              std::move(fallback)}});
}
Plan route_input() { return make({RouteInputNode{}}); }
}  // namespace plan

namespace {

std::string label(const Plan& p);

[[noreturn]] void fail(ErrorCode code, const Plan& p, const std::string& what) {
  throw Error(code, what + " (at " + label(p) + ")");
}

struct ValidateCtx {
  const std::map<std::string, Schema>& tables;
  const ModelLookup& lookup;
};

Schema validate_impl(const Plan& p, const ValidateCtx& ctx, const Schema* route_input);

std::vector<Field> with_appended(const Schema& in, const std::vector<std::string>& names,
                                 const Plan& p) {
  std::vector<Field> fields = in.fields();
  for (const auto& n : names) {
    if (in.contains(n)) fail(ErrorCode::kDuplicateColumn, p, "column '" + n + "' already exists");
    fields.push_back({n, DataType::kFloat64});
  }
  return fields;
}

Schema make_schema(std::vector<Field> fields, const Plan& p) {
  try {
    return Schema(std::move(fields));
  } catch (const Error& e) {
    fail(e.code(), p, e.what());
  }
}

Schema validate_impl(const Plan& p, const ValidateCtx& ctx, const Schema* route_input) {
  return std::visit(
      Overloaded{
          [&](const ScanNode& n) -> Schema {
            auto it = ctx.tables.find(n.table);
            if (it == ctx.tables.end()) fail(ErrorCode::kUnknownTable, p, "unknown table '" + n.table + "'");
            if (n.columns.empty()) fail(ErrorCode::kValidationError, p, "scan reads no columns");
            std::vector<Field> fields;
            for (const auto& c : n.columns) {
              auto idx = it->second.index_of(c);
              if (!idx) fail(ErrorCode::kUnknownColumn, p, "table '" + n.table + "' has no column '" + c + "'");
              fields.push_back(it->second[*idx]);
            }
            return make_schema(std::move(fields), p);
          },
          [&](const FilterNode& n) -> Schema {
            Schema in = validate_impl(n.input, ctx, route_input);
            DataType t;
            try {
              t = type_check(n.predicate, in);
            } catch (const Error& e) {
              fail(e.code(), p, e.what());
            }
            if (t != DataType::kBool) fail(ErrorCode::kTypeMismatch, p, "filter predicate is not BOOL");
            return in;
          },
          [&](const ProjectNode& n) -> Schema {
            Schema in = validate_impl(n.input, ctx, route_input);
            if (n.items.empty()) fail(ErrorCode::kValidationError, p, "projection has no items");
            std::vector<Field> fields;
            for (const auto& item : n.items) {
              try {
                fields.push_back({item.name, type_check(item.expr, in)});
              } catch (const Error& e) {
                fail(e.code(), p, e.what());
              }
            }
            return make_schema(std::move(fields), p);
          },
          [&](const FeaturizeNode& n) -> Schema {
            Schema in = validate_impl(n.input, ctx, route_input);
            const std::string& col = transform_input(n.transform);
            auto idx = in.index_of(col);
            if (!idx) fail(ErrorCode::kUnknownColumn, p, "no column '" + col + "'");
            if (in[*idx].type != transform_input_type(n.transform)) {
              fail(ErrorCode::kTypeMismatch, p, "column '" + col + "' has the wrong type");
            }
            return make_schema(with_appended(in, transform_outputs(n.transform), p), p);
          },
          [&](const PredictNode& n) -> Schema {
            Schema in = validate_impl(n.input, ctx, route_input);
            std::shared_ptr<const ModelPipeline> model = n.model;
            if (!model && ctx.lookup) model = ctx.lookup(n.ref);
            if (!model) fail(ErrorCode::kUnknownModel, p, "unknown model '" + n.ref.to_string() + "'");
            if (n.input_columns.size() != model->raw_inputs.size()) {
              fail(ErrorCode::kArityMismatch, p,
                   "model '" + n.ref.to_string() + "' expects " +
                       std::to_string(model->raw_inputs.size()) + " inputs, got " +
                       std::to_string(n.input_columns.size()));
            }
            for (size_t i = 0; i < n.input_columns.size(); ++i) {
              auto idx = in.index_of(n.input_columns[i]);
              if (!idx) fail(ErrorCode::kUnknownColumn, p, "no column '" + n.input_columns[i] + "'");
              if (in[*idx].type != model->raw_inputs[i].type) {
                fail(ErrorCode::kTypeMismatch, p,
                     "column '" + n.input_columns[i] + "' is " +
                         std::string(type_name(in[*idx].type)) + " but model input '" +
                         model->raw_inputs[i].name + "' is " +
                         std::string(type_name(model->raw_inputs[i].type)));
              }
            }
            return make_schema(with_appended(in, {n.output_column}, p), p);
          },
          [&](const RouteUnionNode& n) -> Schema {
            Schema in = validate_impl(n.input, ctx, route_input);
            auto idx = in.index_of(n.routing_column);
            if (!idx) fail(ErrorCode::kUnknownColumn, p, "no routing column '" + n.routing_column + "'");
            const DataType rt = in[*idx].type;
            for (const auto& c : n.cases) {
              for (const auto& v : c.match) {
                const bool ok = is_numeric(rt) ? is_numeric(type_of(v)) : type_of(v) == rt;
                if (!ok) fail(ErrorCode::kTypeMismatch, p, "match value " + format_value(v) + " has the wrong type");
              }
            }
            Schema out = validate_impl(n.fallback, ctx, &in);
            for (const auto& c : n.cases) {
              if (!(validate_impl(c.continuation, ctx, &in) == out)) {
                fail(ErrorCode::kValidationError, p, "route branches disagree on output schema");
              }
            }
            return out;
          },
          [&](const RouteInputNode&) -> Schema {
            if (route_input == nullptr) fail(ErrorCode::kValidationError, p, "route input outside a RouteUnion");
            return *route_input;
          },
      },
      p.node().v);
}

std::string truncate(std::string s, size_t max) {
  if (s.size() <= max) return s;
  s.resize(max);
  return s + "...";
}

std::string label(const Plan& p) {
  return std::visit(
      Overloaded{
          [](const ScanNode& n) { return "Scan [" + n.table + ", columns=(" + join(n.columns) + ")]"; },
          [](const FilterNode& n) { return "Filter [" + to_string(n.predicate) + "]"; },
          [](const ProjectNode& n) {
            std::vector<std::string> items;
            for (const auto& it : n.items) {
              const auto* ref = std::get_if<ColumnRef>(&it.expr.node().v);
              if (ref != nullptr && ref->name == it.name) {
                items.push_back(it.name);
              } else {
                items.push_back(it.name + " := " + truncate(to_string(it.expr), 60));
              }
            }
            return "Project [" + join(items, ", ") + "]";
          },
          [](const FeaturizeNode& n) { return "Featurize [" + describe(n.transform) + "]"; },
          [](const PredictNode& n) {
            std::string out = "Predict [model=" + n.ref.to_string();
            if (!n.ref.variant.empty() && n.model) {
              out += ", nodes=" + std::to_string(node_count(*n.model));
            }
            if (n.strategy) out += ", strategy=" + std::string(strategy_name(*n.strategy));
            return out + ", in=(" + join(n.input_columns) + "), out=" + n.output_column + "]";
          },
          [](const RouteUnionNode& n) { return "RouteUnion [on=" + n.routing_column + "]"; },
          [](const RouteInputNode&) { return std::string("Input"); },
      },
      p.node().v);
}

void explain_into(const Plan& p, int depth, std::string& out) {
  const std::string indent(static_cast<size_t>(depth) * 2, ' ');
  out += indent + label(p) + "\n";
  if (const auto* ru = std::get_if<RouteUnionNode>(&p.node().v)) {
    for (const auto& c : ru->cases) {
      std::vector<std::string> vals;
      for (const auto& v : c.match) vals.push_back(format_value(v));
      out += indent + "  Case [" + ru->routing_column + " in (" + join(vals, ", ") + ")]\n";
      explain_into(c.continuation, depth + 2, out);
    }
    out += indent + "  Fallback\n";
    explain_into(ru->fallback, depth + 2, out);
  }
  if (Plan in = p.input(); in.valid()) explain_into(in, depth + 1, out);
}

void fingerprint_into(const Plan& p, std::string& out) {
  std::visit(
      Overloaded{
          [&](const ScanNode& n) { out += "Scan(" + n.table + ";" + join(n.columns) + ")"; },
          [&](const FilterNode& n) {
            out += "Filter(" + to_string(n.predicate) + ";";
            fingerprint_into(n.input, out);
            out += ")";
          },
          [&](const ProjectNode& n) {
            out += "Project(";
            for (const auto& it : n.items) out += it.name + "=" + to_string(it.expr) + ";";
            fingerprint_into(n.input, out);
            out += ")";
          },
          [&](const FeaturizeNode& n) {
            out += "Featurize(" + describe(n.transform) + ";";
            fingerprint_into(n.input, out);
            out += ")";
          },
          [&](const PredictNode& n) {
            out += "Predict(" + n.ref.to_string() + ";";
            out += n.model ? model_digest(*n.model) : std::string("unbound");
            out += ";" + join(n.input_columns) + ";" + n.output_column + ";";
            out += n.strategy ? std::string(strategy_name(*n.strategy)) : std::string("-");
            out += ";";
            fingerprint_into(n.input, out);
            out += ")";
          },
          [&](const RouteUnionNode& n) {
            out += "RouteUnion(" + n.routing_column + ";";
            for (const auto& c : n.cases) {
              out += "case{";
              for (const auto& v : c.match) out += format_value(v) + ",";
              out += "}:";
              fingerprint_into(c.continuation, out);
              out += ";";
            }
            out += "fallback:";
            fingerprint_into(n.fallback, out);
            out += ";";
            fingerprint_into(n.input, out);
            out += ")";
          },
          [&](const RouteInputNode&) { out += "Input"; },
      },
      p.node().v);
}

}  // namespace

Schema validate(const Plan& plan, const std::map<std::string, Schema>& tables,
                const ModelLookup& lookup) {
  ValidateCtx ctx{tables, lookup};
  return validate_impl(plan, ctx, nullptr);
}

Plan bind_models(const Plan& p, const ModelLookup& lookup) {
  PlanNode copy = p.node();
  bool changed = false;
  std::visit(Overloaded{
                 [](ScanNode&) {},
                 [](RouteInputNode&) {},
                 [&](RouteUnionNode& n) {
                   for (auto& c : n.cases) c.continuation = bind_models(c.continuation, lookup);
                   n.fallback = bind_models(n.fallback, lookup);
                   n.input = bind_models(n.input, lookup);
                   changed = true;
                 },
                 [&](PredictNode& n) {
                   n.input = bind_models(n.input, lookup);
                   if (!n.model) {
                     n.model = lookup ? lookup(n.ref) : nullptr;
                     if (!n.model) {
                       throw Error(ErrorCode::kUnknownModel, "unknown model '" + n.ref.to_string() + "'");
                     }
                   }
                   changed = true;
                 },
                 [&](auto& n) {
                   n.input = bind_models(n.input, lookup);
                   changed = true;
                 },
             },
             copy.v);
  return changed ? Plan(std::make_shared<const PlanNode>(std::move(copy))) : p;
}

std::string node_label(const Plan& plan) { return label(plan); }

std::string explain(const Plan& plan) {
  std::string out;
  explain_into(plan, 0, out);
  return out;
}

std::string fingerprint(const Plan& plan) {
  std::string out;
  fingerprint_into(plan, out);
  return out;
}

std::string model_digest(const ModelPipeline& m) { return sha256_hex(save_model(m)); }

void visit_plan(const Plan& plan, const std::function<void(const Plan&)>& fn) {
  fn(plan);
  if (const auto* ru = std::get_if<RouteUnionNode>(&plan.node().v)) {
    for (const auto& c : ru->cases) visit_plan(c.continuation, fn);
    visit_plan(ru->fallback, fn);
  }
  if (Plan in = plan.input(); in.valid()) visit_plan(in, fn);
}

const ScanNode* find_scan(const Plan& plan) {
  for (Plan p = plan; p.valid(); p = p.input()) {
    if (const auto* s = std::get_if<ScanNode>(&p.node().v)) return s;
  }
  return nullptr;
}

}  // namespace inferq
