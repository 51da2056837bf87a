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

#include "inferq/optimizer.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>

#include "inferq/error.h"

namespace inferq {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Plan make(PlanNode node) { return Plan(std::make_shared<const PlanNode>(std::move(node))); }

std::string arrow(size_t before, size_t after) {
  return std::to_string(before) + "→" + std::to_string(after);
}

// Rewrites the inputs and continuations of `p` through `fn`, keeping the
// original handle when nothing changed.
Plan map_children(const Plan& p, const std::function<Plan(const Plan&)>& fn) {
  if (const auto* ru = std::get_if<RouteUnionNode>(&p.node().v)) {
    RouteUnionNode copy = *ru;
    bool changed = false;
    for (auto& c : copy.cases) {
      Plan next = fn(c.continuation);
      changed |= !next.same(c.continuation);
      c.continuation = std::move(next);
    }
    Plan fb = fn(copy.fallback);
    changed |= !fb.same(copy.fallback);
    copy.fallback = std::move(fb);
    Plan in = fn(copy.input);
    changed |= !in.same(copy.input);
    copy.input = std::move(in);
    return changed ? make({std::move(copy)}) : p;
  }
  Plan in = p.input();
  if (!in.valid()) return p;
  Plan next = fn(in);
  return next.same(in) ? p : p.with_input(std::move(next));
}

// Bottom-up rewrite of every node.
Plan transform_up(const Plan& p, const std::function<Plan(const Plan&)>& fn) {
  Plan rebuilt = map_children(p, [&](const Plan& c) { return transform_up(c, fn); });
  return fn(rebuilt);
}

bool is_false_literal(const Expr& e) {
  const auto* lit = std::get_if<Literal>(&e.node().v);
  return lit && std::holds_alternative<bool>(lit->value) && !std::get<bool>(lit->value);
}

void add_comparison(DomainConstraints& d, const std::string& column, CmpOp op, const Value& v) {
  if (!is_numeric(type_of(v))) {
    if (op == CmpOp::kEq) d.add(column, ValueSet{v});
    return;
  }
  const double x = as_double(v);
  switch (op) {
    case CmpOp::kLt: d.add(column, Interval(-kInf, false, x, false)); break;
    case CmpOp::kLe: d.add(column, Interval(-kInf, false, x, true)); break;
    case CmpOp::kGt: d.add(column, Interval(x, false, kInf, false)); break;
    case CmpOp::kGe: d.add(column, Interval(x, true, kInf, false)); break;
    case CmpOp::kEq: d.add(column, Interval::point(x)); break;
    case CmpOp::kNe: break;
  }
}

// Filters whose predicates hold for every row leaving `p`, found by walking
// down through nodes that neither rename nor recompute columns.
std::vector<Expr> chain_predicates(const Plan& p) {
  std::vector<Expr> preds;
  for (Plan cur = p; cur.valid();) {
    const auto& v = cur.node().v;
    if (const auto* f = std::get_if<FilterNode>(&v)) {
      preds.push_back(f->predicate);
    } else if (!std::holds_alternative<FeaturizeNode>(v) && !std::holds_alternative<PredictNode>(v)) {
      break;
    }
    cur = cur.input();
  }
  return preds;
}

DomainConstraints chain_domain(const std::vector<Expr>& preds) {
  DomainConstraints d;
  for (const auto& e : preds) d.merge(derive_domain(e));
  return d;
}

// Output column names of `p`, with `route_input` naming a RouteInput leaf's.
std::vector<std::string> output_names(const Plan& p, const std::vector<std::string>& route_input) {
  return std::visit(
      Overloaded{
          [&](const ScanNode& n) { return n.columns; },
          [&](const FilterNode& n) { return output_names(n.input, route_input); },
          [&](const ProjectNode& n) {
            std::vector<std::string> names;
            for (const auto& it : n.items) names.push_back(it.name);
            return names;
          },
          [&](const FeaturizeNode& n) {
            auto names = output_names(n.input, route_input);
            for (const auto& o : transform_outputs(n.transform)) names.push_back(o);
            return names;
          },
          [&](const PredictNode& n) {
            auto names = output_names(n.input, route_input);
            names.push_back(n.output_column);
            return names;
          },
          [&](const RouteUnionNode& n) {
            return output_names(n.fallback, output_names(n.input, route_input));
          },
          [&](const RouteInputNode&) { return route_input; },
      },
      p.node().v);
}

std::set<std::string> to_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

OptimizerConfig OptimizerConfig::none() {
  OptimizerConfig c;
  c.pruning = c.projection_pushdown = c.clustering = c.inlining = c.physical_selection = false;
  return c;
}

void validate_config(const OptimizerConfig& config) {
  if (config.inline_max_nodes < 1) {
    throw Error(ErrorCode::kValidationError, "inline_max_nodes must be at least 1");
  }
  if (!(config.cluster_benefit_threshold > 0.0 && config.cluster_benefit_threshold <= 1.0)) {
    throw Error(ErrorCode::kValidationError, "cluster_benefit_threshold must be in (0, 1]");
  }
  if (config.cluster_max_partitions < 2) {
    throw Error(ErrorCode::kValidationError, "cluster_max_partitions must be at least 2");
  }
  if (!(config.k_vec >= 0.0) || !(config.vector_batch_overhead >= 0.0)) {
    throw Error(ErrorCode::kValidationError, "cost constants must be non-negative");
  }
}

CostEstimate inline_cost(double rows, double ops) { return {rows, ops, 0.0, rows * ops}; }

CostEstimate vector_cost(double rows, double ops, const OptimizerConfig& config) {
  return {rows, ops * config.k_vec, config.vector_batch_overhead,
          rows * ops * config.k_vec + config.vector_batch_overhead};
}

Strategy pick_strategy(double rows, double ops, const OptimizerConfig& config) {
  return inline_cost(rows, ops).total < vector_cost(rows, ops, config).total ? Strategy::kInline
                                                                            : Strategy::kVector;
}

DomainConstraints derive_domain(const Expr& predicate) {
  DomainConstraints d;
  for (const auto& c : conjuncts(predicate)) {
    const auto& v = c.node().v;
    if (const auto* lit = std::get_if<Literal>(&v)) {
      if (is_false_literal(c)) {
        throw Error(ErrorCode::kUnsatisfiablePredicate, "predicate contains FALSE");
      }
      (void)lit;
    } else if (const auto* ref = std::get_if<ColumnRef>(&v)) {
      d.add(ref->name, ValueSet{Value(true)});
    } else if (const auto* cmp = std::get_if<Compare>(&v)) {
      const auto* lcol = std::get_if<ColumnRef>(&cmp->lhs.node().v);
      const auto* rcol = std::get_if<ColumnRef>(&cmp->rhs.node().v);
      const auto* llit = std::get_if<Literal>(&cmp->lhs.node().v);
      const auto* rlit = std::get_if<Literal>(&cmp->rhs.node().v);
      if (lcol && rlit) {
        add_comparison(d, lcol->name, cmp->op, rlit->value);
      } else if (llit && rcol) {
        add_comparison(d, rcol->name, flip(cmp->op), llit->value);
      }
    }
  }
  return d;
}

Plan rule_predicate_model_pruning(const Plan& plan, std::vector<std::string>* log) {
  return transform_up(plan, [&](const Plan& p) -> Plan {
    if (const auto* f = std::get_if<FilterNode>(&p.node().v)) {
      if (is_false_literal(f->predicate)) return p;
      try {
        chain_domain(chain_predicates(p));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUnsatisfiablePredicate) throw;
        if (log) log->push_back("predicate_model_pruning: unsatisfiable filter folded to FALSE");
        return make({FilterNode{f->input, ex::lit(false)}});
      }
      return p;
    }
    const auto* pd = std::get_if<PredictNode>(&p.node().v);
    if (pd == nullptr || !pd->model || !pd->model->is_ensemble()) return p;
    DomainConstraints columns;
    try {
      columns = chain_domain(chain_predicates(pd->input));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnsatisfiablePredicate) throw;
      return p;
    }
    DomainConstraints raw;
    for (size_t i = 0; i < pd->input_columns.size(); ++i) {
      if (const Constraint* c = columns.find(pd->input_columns[i])) {
        raw.add(pd->model->raw_inputs[i].name, *c);
      }
    }
    if (raw.empty()) return p;
    auto pruned = std::make_shared<const ModelPipeline>(prune_with_domain(*pd->model, raw));
    const size_t before = node_count(*pd->model);
    const size_t after = node_count(*pruned);
    if (after >= before) return p;
    PredictNode copy = *pd;
    copy.model = pruned;
    copy.ref.variant = "pruned";
    if (log) log->push_back("predicate_model_pruning: " + pd->ref.name + " " + arrow(before, after) + " nodes");
    return make({std::move(copy)});
  });
}

namespace {

// Rewrites `p` so it only produces what its consumer needs. `required` names
// the columns the consumer reads; `leaf_required` receives what a RouteInput
// leaf must supply.
Plan push_columns(const Plan& p, const std::set<std::string>& required,
                  std::set<std::string>* leaf_required, std::vector<std::string>* log) {
  return std::visit(
      Overloaded{
          [&](const ScanNode& n) -> Plan {
            std::vector<std::string> keep;
            for (const auto& c : n.columns) {
              if (required.count(c)) keep.push_back(c);
            }
            if (keep.empty() && !n.columns.empty()) keep.push_back(n.columns.front());
            if (keep.size() == n.columns.size()) return p;
            if (log) {
              log->push_back("projection_pushdown: " + n.table + " " + arrow(n.columns.size(), keep.size()) +
                             " columns");
            }
            return make({ScanNode{n.table, std::move(keep)}});
          },
          [&](const RouteInputNode&) -> Plan {
            if (leaf_required) leaf_required->insert(required.begin(), required.end());
            return p;
          },
          [&](const FilterNode& n) -> Plan {
            auto need = required;
            collect_columns(n.predicate, need);
            Plan in = push_columns(n.input, need, leaf_required, log);
            return in.same(n.input) ? p : p.with_input(std::move(in));
          },
          [&](const ProjectNode& n) -> Plan {
            std::set<std::string> need;
            for (const auto& it : n.items) collect_columns(it.expr, need);
            Plan in = push_columns(n.input, need, leaf_required, log);
            return in.same(n.input) ? p : p.with_input(std::move(in));
          },
          [&](const FeaturizeNode& n) -> Plan {
            auto need = required;
            for (const auto& o : transform_outputs(n.transform)) need.erase(o);
            need.insert(transform_input(n.transform));
            Plan in = push_columns(n.input, need, leaf_required, log);
            return in.same(n.input) ? p : p.with_input(std::move(in));
          },
          [&](const PredictNode& n) -> Plan {
            PredictNode copy = n;
            bool changed = false;
            if (n.model) {
              auto slim = drop_unused_inputs(*n.model);
              if (slim.raw_inputs.size() < n.model->raw_inputs.size()) {
                std::vector<std::string> cols;
                size_t j = 0;
                for (size_t i = 0; i < n.model->raw_inputs.size() && j < slim.raw_inputs.size(); ++i) {
                  if (n.model->raw_inputs[i].name == slim.raw_inputs[j].name) {
                    cols.push_back(n.input_columns[i]);
                    ++j;
                  }
                }
                if (log) {
                  log->push_back("projection_pushdown: " + n.ref.name + " " +
                                 arrow(n.model->raw_inputs.size(), slim.raw_inputs.size()) + " inputs");
                }
                copy.model = std::make_shared<const ModelPipeline>(std::move(slim));
                copy.input_columns = std::move(cols);
                changed = true;
              }
            }
            auto need = required;
            need.erase(n.output_column);
            need.insert(copy.input_columns.begin(), copy.input_columns.end());
            Plan in = push_columns(n.input, need, leaf_required, log);
            changed |= !in.same(n.input);
            copy.input = std::move(in);
            return changed ? make({std::move(copy)}) : p;
          },
          [&](const RouteUnionNode& n) -> Plan {
            RouteUnionNode copy = n;
            bool changed = false;
            std::set<std::string> need{n.routing_column};
            for (auto& c : copy.cases) {
              Plan next = push_columns(c.continuation, required, &need, log);
              changed |= !next.same(c.continuation);
              c.continuation = std::move(next);
            }
            Plan fb = push_columns(copy.fallback, required, &need, log);
            changed |= !fb.same(copy.fallback);
            copy.fallback = std::move(fb);
            Plan in = push_columns(n.input, need, leaf_required, log);
            changed |= !in.same(n.input);
            copy.input = std::move(in);
            return changed ? make({std::move(copy)}) : p;
          },
      },
      p.node().v);
}

struct ClusterChoice {
  std::string column;
  std::vector<std::pair<Value, std::shared_ptr<const ModelPipeline>>> parts;
  double mean_nodes = 0.0;
};

std::optional<ClusterChoice> plan_clustering(const PredictNode& pd, const TableStats& stats,
                                             const OptimizerConfig& config) {
  const ModelPipeline& m = *pd.model;
  if (!m.is_ensemble()) return std::nullopt;
  const size_t original = node_count(m);
  std::set<std::string> split_features;
  for (const auto& t : std::get<TreeEnsemble>(m.core).trees) {
    std::vector<const TreeNode*> stack{t.get()};
    while (!stack.empty()) {
      const TreeNode* n = stack.back();
      stack.pop_back();
      if (n->is_leaf()) continue;
      split_features.insert(n->feature);
      stack.push_back(n->left.get());
      stack.push_back(n->right.get());
    }
  }
  std::optional<ClusterChoice> best;
  std::set<std::string> tried;
  for (size_t i = 0; i < m.raw_inputs.size(); ++i) {
    const auto& raw = m.raw_inputs[i];
    const std::string& column = pd.input_columns[i];
    if (raw.type != DataType::kFloat64 || !split_features.count(raw.name) || tried.count(column)) continue;
    tried.insert(column);
    const ColumnStats* cs = stats.find(column);
    if (cs == nullptr || cs->type != DataType::kFloat64 || !cs->distinct_exact || cs->values.empty() ||
        cs->distinct_count > static_cast<uint64_t>(config.cluster_max_partitions)) {
      continue;
    }
    ClusterChoice choice;
    choice.column = column;
    double total = 0.0;
    for (const auto& v : cs->values) {
      DomainConstraints d;
      for (size_t j = 0; j < m.raw_inputs.size(); ++j) {
        if (pd.input_columns[j] == column && m.raw_inputs[j].type == DataType::kFloat64) {
          d.add(m.raw_inputs[j].name, ValueSet{v});
        }
      }
      auto pruned = std::make_shared<const ModelPipeline>(prune_with_domain(m, d));
      total += static_cast<double>(node_count(*pruned));
      choice.parts.emplace_back(v, std::move(pruned));
    }
    choice.mean_nodes = total / static_cast<double>(choice.parts.size());
    if (choice.mean_nodes > config.cluster_benefit_threshold * static_cast<double>(original)) continue;
    if (!best || choice.mean_nodes < best->mean_nodes) best = std::move(choice);
  }
  return best;
}

// Names the consumers of `p` read; nullopt means every output column.
using Required = std::optional<std::set<std::string>>;

Expr featurize_expr(const Transform& t, const std::string& output) {
  if (const auto* sc = std::get_if<Scale>(&t)) {
    return ex::arith(ArithOp::kDiv, ex::arith(ArithOp::kSub, ex::col(sc->input), ex::lit(sc->mean)),
                     ex::lit(sc->stddev));
  }
  const auto& oh = std::get<OneHot>(t);
  for (size_t k = 0; k < oh.outputs.size(); ++k) {
    if (oh.outputs[k] == output) {
      return ex::case_({CaseBranch{ex::cmp(CmpOp::kEq, ex::col(oh.input), ex::lit(oh.categories[k])),
                                   ex::lit(1.0)}},
                       ex::lit(0.0));
    }
  }
  throw Error(ErrorCode::kUnknownColumn, "no featurizer output '" + output + "'");
}

Plan inline_models(const Plan& p, const Required& required, const std::vector<std::string>& route_input,
                   const OptimizerConfig& config, std::vector<std::string>* log);

Plan inline_child(const Plan& child, const Required& required, const std::vector<std::string>& route_input,
                  const OptimizerConfig& config, std::vector<std::string>* log) {
  return inline_models(child, required, route_input, config, log);
}

Plan inline_models(const Plan& p, const Required& required, const std::vector<std::string>& route_input,
                   const OptimizerConfig& config, std::vector<std::string>* log) {
  const auto& v = p.node().v;
  if (const auto* f = std::get_if<FilterNode>(&v)) {
    Required need = required;
    if (need) collect_columns(f->predicate, *need);
    Plan in = inline_child(f->input, need, route_input, config, log);
    return in.same(f->input) ? p : p.with_input(std::move(in));
  }
  if (const auto* pr = std::get_if<ProjectNode>(&v)) {
    std::set<std::string> need;
    for (const auto& it : pr->items) collect_columns(it.expr, need);
    Plan in = inline_child(pr->input, need, route_input, config, log);
    return in.same(pr->input) ? p : p.with_input(std::move(in));
  }
  if (const auto* fz = std::get_if<FeaturizeNode>(&v)) {
    Required need = required;
    if (need) {
      for (const auto& o : transform_outputs(fz->transform)) need->erase(o);
      need->insert(transform_input(fz->transform));
    }
    Plan in = inline_child(fz->input, need, route_input, config, log);
    return in.same(fz->input) ? p : p.with_input(std::move(in));
  }
  if (const auto* ru = std::get_if<RouteUnionNode>(&v)) {
    const auto in_names = output_names(ru->input, route_input);
    RouteUnionNode copy = *ru;
    bool changed = false;
    for (auto& c : copy.cases) {
      Plan next = inline_models(c.continuation, required, in_names, config, log);
      changed |= !next.same(c.continuation);
      c.continuation = std::move(next);
    }
    Plan fb = inline_models(copy.fallback, required, in_names, config, log);
    changed |= !fb.same(copy.fallback);
    copy.fallback = std::move(fb);
    Plan in = inline_models(ru->input, std::nullopt, route_input, config, log);
    changed |= !in.same(ru->input);
    copy.input = std::move(in);
    return changed ? make({std::move(copy)}) : p;
  }
  const auto* pd = std::get_if<PredictNode>(&v);
  if (pd == nullptr) return p;

  Required need = required;
  if (need) {
    need->erase(pd->output_column);
    need->insert(pd->input_columns.begin(), pd->input_columns.end());
  }
  const ModelPipeline* m = pd->model.get();
  const bool eligible =
      m != nullptr && (m->is_linear() || node_count(*m) <= static_cast<size_t>(config.inline_max_nodes));
  if (!eligible) {
    Plan in = inline_child(pd->input, need, route_input, config, log);
    return in.same(pd->input) ? p : p.with_input(std::move(in));
  }

  // A Featurize directly below is absorbed when nothing above reads its
  // outputs.
  Plan source = pd->input;
  std::map<std::string, Expr> bindings;
  std::optional<Transform> absorbed;
  if (const auto* fz = std::get_if<FeaturizeNode>(&source.node().v)) {
    const auto outs = to_set(transform_outputs(fz->transform));
    bool read_above = !required.has_value();
    if (required) {
      for (const auto& o : outs) read_above |= required->count(o) > 0;
    }
    if (!read_above) {
      absorbed = fz->transform;
      source = fz->input;
    }
  }
  for (size_t i = 0; i < pd->input_columns.size(); ++i) {
    const std::string& c = pd->input_columns[i];
    Expr e = ex::col(c);
    if (absorbed) {
      const auto outs = transform_outputs(*absorbed);
      if (std::find(outs.begin(), outs.end(), c) != outs.end()) e = featurize_expr(*absorbed, c);
    }
    bindings.emplace(m->raw_inputs[i].name, e);
  }
  Required below = need;
  if (below && absorbed) {
    for (const auto& o : transform_outputs(*absorbed)) below->erase(o);
    below->insert(transform_input(*absorbed));
  }
  source = inline_child(source, below, route_input, config, log);

  std::vector<ProjectItem> items;
  for (const auto& name : output_names(source, route_input)) items.push_back({ex::col(name), name});
  items.push_back({inline_to_expr(*m, bindings), pd->output_column});
  if (log) {
    log->push_back("model_inlining: " + pd->ref.name + " " + std::to_string(node_count(*m)) + " nodes" +
                   (absorbed ? " (featurizer absorbed)" : ""));
  }
  return plan::project(std::move(source), std::move(items));
}

// Estimated rows leaving `p`; negative when unknown. `route_rows` is the
// estimate for a RouteInput leaf (negative when unknown).
double scan_rows(const Plan& p, const StatsMap& stats, double route_rows, const TableStats** table_stats) {
  std::vector<Expr> preds;
  Plan cur = p;
  while (cur.valid()) {
    if (const auto* f = std::get_if<FilterNode>(&cur.node().v)) preds.push_back(f->predicate);
    if (std::holds_alternative<ScanNode>(cur.node().v) || std::holds_alternative<RouteInputNode>(cur.node().v)) {
      break;
    }
    cur = cur.input();
  }
  double rows = 0.0;
  const TableStats* ts = nullptr;
  if (const auto* scan = std::get_if<ScanNode>(&cur.node().v)) {
    auto it = stats.find(scan->table);
    if (it == stats.end()) return -1.0;
    ts = &it->second;
    rows = static_cast<double>(ts->row_count);
  } else {
    if (route_rows < 0 || *table_stats == nullptr) return -1.0;
    ts = *table_stats;
    rows = route_rows;
  }
  for (const auto& e : preds) rows *= selectivity(e, *ts);
  *table_stats = ts;
  return rows;
}

Plan assign_strategies(const Plan& p, const StatsMap& stats, const OptimizerConfig& config,
                       double route_rows, const TableStats* route_stats,
                       std::vector<std::string>* log) {
  if (const auto* ru = std::get_if<RouteUnionNode>(&p.node().v)) {
    const TableStats* ts = route_stats;
    const double inner = scan_rows(ru->input, stats, route_rows, &ts);
    RouteUnionNode copy = *ru;
    bool changed = false;
    for (auto& c : copy.cases) {
      Plan next = assign_strategies(c.continuation, stats, config, inner, ts, log);
      changed |= !next.same(c.continuation);
      c.continuation = std::move(next);
    }
    Plan fb = assign_strategies(copy.fallback, stats, config, inner, ts, log);
    changed |= !fb.same(copy.fallback);
    copy.fallback = std::move(fb);
    Plan in = assign_strategies(ru->input, stats, config, route_rows, route_stats, log);
    changed |= !in.same(ru->input);
    copy.input = std::move(in);
    return changed ? make({std::move(copy)}) : p;
  }
  Plan in = p.input();
  Plan next = in.valid() ? assign_strategies(in, stats, config, route_rows, route_stats, log) : in;
  Plan self = in.valid() && !next.same(in) ? p.with_input(next) : p;
  const auto* pd = std::get_if<PredictNode>(&self.node().v);
  if (pd == nullptr || !pd->model) return self;

  Strategy s = Strategy::kVector;
  const TableStats* ts = route_stats;
  const double rows = scan_rows(pd->input, stats, route_rows, &ts);
  if (rows >= 0) {
    const double ops = static_cast<double>(op_count(*pd->model));
    s = pick_strategy(rows, ops, config);
  }
  if (pd->strategy == s) return self;
  PredictNode copy = *pd;
  copy.strategy = s;
  if (log && s == Strategy::kInline) {
    log->push_back("physical_selection: " + pd->ref.name + " INLINE (est_rows=" + format_double(rows) + ")");
  }
  return make({std::move(copy)});
}

Plan default_strategies(const Plan& plan) {
  return transform_up(plan, [](const Plan& p) -> Plan {
    const auto* pd = std::get_if<PredictNode>(&p.node().v);
    if (pd == nullptr || pd->strategy) return p;
    PredictNode copy = *pd;
    copy.strategy = Strategy::kVector;
    return make({std::move(copy)});
  });
}

Plan to_fixpoint(const Plan& plan, const std::function<Plan(const Plan&)>& rule) {
  constexpr int kMaxPasses = 10;
  Plan cur = plan;
  for (int i = 0; i < kMaxPasses; ++i) {
    Plan next = rule(cur);
    if (next.same(cur) || fingerprint(next) == fingerprint(cur)) return next;
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

Plan rule_projection_pushdown(const Plan& plan, std::vector<std::string>* log) {
  return push_columns(plan, to_set(output_names(plan, {})), nullptr, log);
}

Plan rule_model_clustering(const Plan& plan, const StatsMap& stats, const OptimizerConfig& config,
                           std::vector<std::string>* log) {
  // Only Predicts on the main chain are candidates; continuations already
  // hold specialized models.
  std::function<Plan(const Plan&)> walk = [&](const Plan& p) -> Plan {
    if (std::holds_alternative<RouteUnionNode>(p.node().v)) {
      const auto& ru = std::get<RouteUnionNode>(p.node().v);
      Plan in = walk(ru.input);
      return in.same(ru.input) ? p : p.with_input(std::move(in));
    }
    Plan in = p.input();
    Plan next = in.valid() ? walk(in) : in;
    Plan self = in.valid() && !next.same(in) ? p.with_input(next) : p;
    const auto* pd = std::get_if<PredictNode>(&self.node().v);
    if (pd == nullptr || !pd->model) return self;
    const ScanNode* scan = find_scan(pd->input);
    if (scan == nullptr) return self;
    auto it = stats.find(scan->table);
    if (it == stats.end()) return self;
    auto choice = plan_clustering(*pd, it->second, config);
    if (!choice) return self;

    std::vector<RouteCase> cases;
    for (const auto& [value, model] : choice->parts) {
      ModelRef ref = pd->ref;
      ref.variant = choice->column + "=" + format_value(value);
      cases.push_back(RouteCase{{value}, plan::predict(plan::route_input(), ref, model, pd->input_columns,
                                                       pd->output_column, pd->strategy)});
    }
    Plan fallback = plan::predict(plan::route_input(), pd->ref, pd->model, pd->input_columns,
                                  pd->output_column, pd->strategy);
    if (log) {
      log->push_back("model_clustering: " + pd->ref.name + " on " + choice->column + ", " +
                     std::to_string(choice->parts.size()) + " partitions, mean " +
                     arrow(node_count(*pd->model), static_cast<size_t>(choice->mean_nodes + 0.5)) + " nodes");
    }
    return plan::route_union(pd->input, choice->column, std::move(cases), std::move(fallback));
  };
  return walk(plan);
}

Plan rule_model_inlining(const Plan& plan, const OptimizerConfig& config, std::vector<std::string>* log) {
  return inline_models(plan, std::nullopt, {}, config, log);
}

Plan choose_physical(const Plan& plan, const StatsMap& stats, const OptimizerConfig& config,
                     std::vector<std::string>* log) {
  return assign_strategies(plan, stats, config, -1.0, nullptr, log);
}

OptimizeResult optimize(const Plan& plan, const StatsMap& stats, const OptimizerConfig& config,
                        const ModelLookup& lookup) {
  validate_config(config);
  OptimizeResult result;
  auto* log = &result.rewrites;
  Plan p = lookup ? bind_models(plan, lookup) : plan;
  if (config.pruning) {
    p = to_fixpoint(p, [&](const Plan& x) { return rule_predicate_model_pruning(x, log); });
  }
  if (config.projection_pushdown) {
    p = to_fixpoint(p, [&](const Plan& x) { return rule_projection_pushdown(x, log); });
  }
  if (config.clustering) {
    p = to_fixpoint(p, [&](const Plan& x) { return rule_model_clustering(x, stats, config, log); });
    if (config.projection_pushdown) {
      p = to_fixpoint(p, [&](const Plan& x) { return rule_projection_pushdown(x, log); });
    }
  }
  if (config.inlining) {
    p = to_fixpoint(p, [&](const Plan& x) { return rule_model_inlining(x, config, log); });
  }
  if (config.physical_selection) {
    p = to_fixpoint(p, [&](const Plan& x) { return choose_physical(x, stats, config, log); });
  }
  result.plan = default_strategies(p);
  return result;
}

std::string explain(const OptimizeResult& result) {
  std::string out = explain(result.plan);
  out += "-- rewrites:\n";
  if (result.rewrites.empty()) out += "  (none)\n";
  for (const auto& r : result.rewrites) out += "  " + r + "\n";
  return out;
}

size_t total_model_nodes(const Plan& plan) {
  size_t total = 0;
  visit_plan(plan, [&](const Plan& p) {
    if (const auto* pd = std::get_if<PredictNode>(&p.node().v); pd && pd->model) total += node_count(*pd->model);
  });
  return total;
}

}  // namespace inferq
