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

#include "inferq/executor.h"

#include <algorithm>
#include <numeric>

#include "inferq/error.h"
#include "inferq/kernels.h"

namespace inferq {

namespace {

class Stage {
 public:
  explicit Stage(Plan node) : node_(std::move(node)) {}
  virtual ~Stage() = default;

  const Schema& output_schema() const { return out_; }

  Batch run(Batch in) const {
    try {
      return apply(std::move(in));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (in " + node_label(node_) + ")");
    }
  }

 protected:
  virtual Batch apply(Batch in) const = 0;

  Plan node_;
  Schema out_;
};

using StageList = std::vector<std::unique_ptr<Stage>>;

class FilterStage : public Stage {
 public:
  FilterStage(Plan node, const FilterNode& f, const Schema& in)
      : Stage(std::move(node)), pred_(f.predicate, in) {
    out_ = in;
  }

 protected:
  Batch apply(Batch in) const override {
    std::vector<uint32_t> keep;
    keep.reserve(in.size());
    for (size_t i = 0; i < in.size(); ++i) {
      if (pred_.eval_bool(in, i)) keep.push_back(static_cast<uint32_t>(i));
    }
    if (keep.size() == in.size()) return in;
    return gather_batch(in, keep);
  }

 private:
  CompiledExpr pred_;
};

class ProjectStage : public Stage {
 public:
  ProjectStage(Plan node, const ProjectNode& p, const Schema& in) : Stage(std::move(node)) {
    std::vector<Field> fields;
    for (const auto& item : p.items) {
      const auto* ref = std::get_if<ColumnRef>(&item.expr.node().v);
      passthrough_.push_back(ref ? static_cast<int>(*in.index_of(ref->name)) : -1);
      exprs_.emplace_back(item.expr, in);
      fields.push_back({item.name, exprs_.back().type()});
    }
    out_ = Schema(std::move(fields));
  }

 protected:
  Batch apply(Batch in) const override {
    Batch out;
    out.schema = out_;
    for (size_t i = 0; i < exprs_.size(); ++i) {
      if (passthrough_[i] >= 0) {
        out.columns.push_back(in.columns[passthrough_[i]]);
      } else {
        out.columns.push_back(exprs_[i].eval_column(in));
      }
    }
    out.row_ids = std::move(in.row_ids);
    return out;
  }

 private:
  std::vector<CompiledExpr> exprs_;
  std::vector<int> passthrough_;
};

class FeaturizeStage : public Stage {
 public:
  FeaturizeStage(Plan node, const FeaturizeNode& f, const Schema& in)
      : Stage(std::move(node)), transform_(f.transform),
        input_(static_cast<int>(*in.index_of(transform_input(f.transform)))) {
    std::vector<Field> fields = in.fields();
    for (const auto& o : transform_outputs(transform_)) fields.push_back({o, DataType::kFloat64});
    out_ = Schema(std::move(fields));
  }

 protected:
  Batch apply(Batch in) const override {
    const size_t n = in.size();
    if (const auto* oh = std::get_if<OneHot>(&transform_)) {
      const auto& col = std::get<3>(in.columns[input_]);
      for (const auto& cat : oh->categories) {
        std::vector<double> out(n);
        for (size_t i = 0; i < n; ++i) out[i] = col[i] == cat ? 1.0 : 0.0;
        in.columns.push_back(std::move(out));
      }
    } else {
      const auto& sc = std::get<Scale>(transform_);
      const auto& col = std::get<1>(in.columns[input_]);
      std::vector<double> out(n);
      for (size_t i = 0; i < n; ++i) out[i] = (col[i] - sc.mean) / sc.stddev;
      in.columns.push_back(std::move(out));
    }
    in.schema = out_;
    return in;
  }

 private:
  Transform transform_;
  int input_;
};

class PredictVectorStage : public Stage {
 public:
  PredictVectorStage(Plan node, const PredictNode& p, const Schema& in)
      : Stage(std::move(node)), model_(p.model) {
    for (const auto& c : p.input_columns) inputs_.push_back(static_cast<int>(*in.index_of(c)));
    std::vector<Field> fields = in.fields();
    fields.push_back({p.output_column, DataType::kFloat64});
    out_ = Schema(std::move(fields));
  }

 protected:
  Batch apply(Batch in) const override {
    std::vector<const Column*> raw;
    raw.reserve(inputs_.size());
    for (int idx : inputs_) raw.push_back(&in.columns[idx]);
    in.columns.push_back(model_.predict(raw, in.size()));
    in.schema = out_;
    return in;
  }

 private:
  CompiledModel model_;
  std::vector<int> inputs_;
};

class PredictInlineStage : public Stage {
 public:
  PredictInlineStage(Plan node, const PredictNode& p, const Schema& in)
      : Stage(std::move(node)), expr_(inline_expr(p), in) {
    std::vector<Field> fields = in.fields();
    fields.push_back({p.output_column, DataType::kFloat64});
    out_ = Schema(std::move(fields));
  }

 protected:
  Batch apply(Batch in) const override {
    in.columns.push_back(expr_.eval_column(in));
    in.schema = out_;
    return in;
  }

 private:
  static Expr inline_expr(const PredictNode& p) {
    std::map<std::string, Expr> bindings;
    for (size_t i = 0; i < p.input_columns.size(); ++i) {
      bindings.emplace(p.model->raw_inputs[i].name, ex::col(p.input_columns[i]));
    }
    return inline_to_expr(*p.model, bindings);
  }

  CompiledExpr expr_;
};

StageList compile_chain(const Plan& plan, const Schema* route_input, const ScanNode** scan_out,
                        Schema* scan_schema, const std::map<std::string, Table>* tables);

Batch run_chain(const StageList& stages, Batch b) {
  for (const auto& s : stages) {
    b = s->run(std::move(b));
    if (b.size() == 0) break;
  }
  return b;
}

class RouteUnionStage : public Stage {
 public:
  RouteUnionStage(Plan node, const RouteUnionNode& r, const Schema& in,
                  const std::map<std::string, Table>* tables)
      : Stage(std::move(node)), routing_(static_cast<int>(*in.index_of(r.routing_column))) {
    for (const auto& c : r.cases) {
      matches_.push_back(c.match);
      branches_.push_back(compile_chain(c.continuation, &in, nullptr, nullptr, tables));
    }
    fallback_ = compile_chain(r.fallback, &in, nullptr, nullptr, tables);
    out_ = fallback_.empty() ? in : fallback_.back()->output_schema();
  }

 protected:
  Batch apply(Batch in) const override {
    const size_t n = in.size();
    std::vector<std::vector<uint32_t>> parts(branches_.size() + 1);
    const Column& route = in.columns[routing_];
    for (size_t i = 0; i < n; ++i) {
      parts[branch_of(route, i)].push_back(static_cast<uint32_t>(i));
    }
    Batch merged;
    merged.schema = out_;
    for (const auto& f : out_.fields()) merged.columns.push_back(make_column(f.type));
    for (size_t k = 0; k < parts.size(); ++k) {
      if (parts[k].empty()) continue;
      const StageList& chain = k < branches_.size() ? branches_[k] : fallback_;
      Batch out = run_chain(chain, gather_batch(in, parts[k]));
      if (out.size() == 0) continue;
      for (size_t c = 0; c < merged.columns.size(); ++c) append_column(merged.columns[c], out.columns[c]);
      merged.row_ids.insert(merged.row_ids.end(), out.row_ids.begin(), out.row_ids.end());
    }
    std::vector<uint32_t> order(merged.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return merged.row_ids[a] < merged.row_ids[b]; });
    return gather_batch(merged, order);
  }

 private:
  size_t branch_of(const Column& route, size_t row) const {
    const Value v = column_value(route, row);
    const bool numeric = is_numeric(type_of(v));
    for (size_t k = 0; k < matches_.size(); ++k) {
      for (const auto& m : matches_[k]) {
        if (numeric ? (is_numeric(type_of(m)) && as_double(m) == as_double(v)) : m == v) return k;
      }
    }
    return matches_.size();
  }

  int routing_;
  std::vector<std::vector<Value>> matches_;
  std::vector<StageList> branches_;
  StageList fallback_;
};

// Compiles the single-input chain rooted at `plan` into stages, innermost
// first. The chain's leaf is either a Scan (reported through `scan_out`) or
// the RouteInput whose schema is `route_input`.
StageList compile_chain(const Plan& plan, const Schema* route_input, const ScanNode** scan_out,
                        Schema* scan_schema, const std::map<std::string, Table>* tables) {
  std::vector<Plan> chain;
  for (Plan p = plan; p.valid(); p = p.input()) chain.push_back(p);
  std::reverse(chain.begin(), chain.end());

  Schema current;
  const Plan& leaf = chain.front();
  if (const auto* scan = std::get_if<ScanNode>(&leaf.node().v)) {
    if (scan_out == nullptr) throw Error(ErrorCode::kValidationError, "Scan inside a route branch");
    auto it = tables->find(scan->table);
    if (it == tables->end()) throw Error(ErrorCode::kUnknownTable, "unknown table '" + scan->table + "'");
    std::vector<Field> fields;
    for (const auto& c : scan->columns) fields.push_back(it->second.schema().field(c, "scan"));
    current = Schema(std::move(fields));
    *scan_out = scan;
    *scan_schema = current;
  } else if (std::holds_alternative<RouteInputNode>(leaf.node().v)) {
    if (route_input == nullptr) throw Error(ErrorCode::kValidationError, "route input outside a RouteUnion");
    current = *route_input;
  } else {
    throw Error(ErrorCode::kValidationError, "plan chain has no leaf");
  }

  StageList stages;
  for (size_t i = 1; i < chain.size(); ++i) {
    const Plan& p = chain[i];
    std::unique_ptr<Stage> stage;
    if (const auto* f = std::get_if<FilterNode>(&p.node().v)) {
      stage = std::make_unique<FilterStage>(p, *f, current);
    } else if (const auto* pr = std::get_if<ProjectNode>(&p.node().v)) {
      stage = std::make_unique<ProjectStage>(p, *pr, current);
    } else if (const auto* fz = std::get_if<FeaturizeNode>(&p.node().v)) {
      stage = std::make_unique<FeaturizeStage>(p, *fz, current);
    } else if (const auto* pd = std::get_if<PredictNode>(&p.node().v)) {
      if (!pd->model) throw Error(ErrorCode::kUnknownModel, "unbound model " + pd->ref.to_string());
      if (pd->strategy == Strategy::kInline) {
        stage = std::make_unique<PredictInlineStage>(p, *pd, current);
      } else {
        stage = std::make_unique<PredictVectorStage>(p, *pd, current);
      }
    } else if (const auto* ru = std::get_if<RouteUnionNode>(&p.node().v)) {
      stage = std::make_unique<RouteUnionStage>(p, *ru, current, tables);
    } else {
      throw Error(ErrorCode::kValidationError, "unexpected leaf node inside a chain");
    }
    current = stage->output_schema();
    stages.push_back(std::move(stage));
  }
  return stages;
}

}  // namespace

struct PlanCursor::Impl {
  const Table* table = nullptr;
  std::vector<size_t> scan_columns;
  Schema scan_schema;
  StageList stages;
  Schema schema;
  size_t batch_size = kDefaultBatchSize;
  size_t offset = 0;
};

PlanCursor::PlanCursor(const Plan& plan, const std::map<std::string, Table>& tables,
                       const ExecOptions& options)
    : impl_(std::make_unique<Impl>()) {
  if (options.batch_size == 0) throw Error(ErrorCode::kValidationError, "batch size must be positive");
  const ScanNode* scan = nullptr;
  impl_->stages = compile_chain(plan, nullptr, &scan, &impl_->scan_schema, &tables);
  impl_->table = &tables.at(scan->table);
  for (const auto& c : scan->columns) {
    impl_->scan_columns.push_back(*impl_->table->schema().index_of(c));
  }
  impl_->schema = impl_->stages.empty() ? impl_->scan_schema : impl_->stages.back()->output_schema();
  impl_->batch_size = options.batch_size;
}

PlanCursor::~PlanCursor() = default;
PlanCursor::PlanCursor(PlanCursor&&) noexcept = default;
PlanCursor& PlanCursor::operator=(PlanCursor&&) noexcept = default;

const Schema& PlanCursor::schema() const { return impl_->schema; }

std::optional<Batch> PlanCursor::next() {
  Impl& s = *impl_;
  while (s.offset < s.table->num_rows()) {
    const size_t count = std::min(s.batch_size, s.table->num_rows() - s.offset);
    Batch b;
    b.schema = s.scan_schema;
    for (size_t c : s.scan_columns) b.columns.push_back(slice(s.table->column(c), s.offset, count));
    b.row_ids.resize(count);
    std::iota(b.row_ids.begin(), b.row_ids.end(), static_cast<uint64_t>(s.offset));
    s.offset += count;
    Batch out = run_chain(s.stages, std::move(b));
    if (out.size() > 0) return out;
  }
  return std::nullopt;
}

Table execute(const Plan& plan, const std::map<std::string, Table>& tables,
              const ExecOptions& options) {
  PlanCursor cursor(plan, tables, options);
  std::vector<Column> columns;
  for (const auto& f : cursor.schema().fields()) columns.push_back(make_column(f.type));
  while (auto batch = cursor.next()) {
    for (size_t c = 0; c < columns.size(); ++c) append_column(columns[c], batch->columns[c]);
  }
  return Table(cursor.schema(), std::move(columns));
}

}  // namespace inferq
