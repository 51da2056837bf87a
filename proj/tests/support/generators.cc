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

#include "support/generators.h"

#include <algorithm>
#include <cmath>

namespace inferq::testing {

namespace {

std::vector<std::string> float_columns(const Schema& schema) {
  std::vector<std::string> out;
  for (const auto& f : schema.fields()) {
    if (f.type == DataType::kFloat64) out.push_back(f.name);
  }
  return out;
}

TreePtr random_tree(Rng& rng, const std::vector<std::string>& features, int depth) {
  if (depth <= 1 || features.empty() || rng.chance(0.15)) return TreeNode::leaf(rng.uniform(-1.0, 1.0));
  const std::string& f = rng.pick(features);
  const double t = rng.chance(0.8) ? rng.grid() : rng.uniform(0.0, 4.0);
  return TreeNode::split(f, t, random_tree(rng, features, depth - 1), random_tree(rng, features, depth - 1));
}

// Raw inputs for a subset of the FLOAT64 columns, plus optional featurizers.
void random_inputs(Rng& rng, const Schema& schema, const ModelShape& shape, ModelPipeline& m,
                   std::vector<std::string>& core_features) {
  auto cols = float_columns(schema);
  std::shuffle(cols.begin(), cols.end(), rng.engine());
  const size_t n = static_cast<size_t>(rng.integer(1, static_cast<int64_t>(cols.size())));
  for (size_t i = 0; i < n; ++i) {
    m.raw_inputs.push_back({cols[i], DataType::kFloat64});
    core_features.push_back(cols[i]);
  }
  if (!shape.allow_featurizers) return;
  if (schema.contains("s") && rng.chance(0.4)) {
    m.raw_inputs.push_back({"s", DataType::kString});
    OneHot oh;
    oh.input = "s";
    oh.categories = {"red", "green"};
    if (rng.chance(0.5)) oh.categories.push_back("blue");
    for (const auto& c : oh.categories) oh.outputs.push_back("s_" + c);
    for (const auto& o : oh.outputs) core_features.push_back(o);
    m.featurizers.emplace_back(std::move(oh));
  }
  if (rng.chance(0.3)) {
    Scale sc;
    sc.input = m.raw_inputs.front().name;
    sc.mean = rng.grid();
    sc.stddev = rng.pick(std::vector<double>{0.5, 1.0, 2.0, 3.0});
    sc.output = sc.input + "_z";
    core_features.push_back(sc.output);
    m.featurizers.emplace_back(std::move(sc));
  }
}

}  // namespace

Schema random_schema(const TableShape& shape) {
  std::vector<Field> fields;
  for (size_t i = 0; i < shape.float_columns; ++i) fields.push_back({"c" + std::to_string(i), DataType::kFloat64});
  fields.push_back({"g", DataType::kFloat64});
  fields.push_back({"k", DataType::kInt64});
  fields.push_back({"s", DataType::kString});
  return Schema(std::move(fields));
}

Table random_table(Rng& rng, const Schema& schema, size_t rows) {
  std::vector<Column> columns;
  for (const auto& f : schema.fields()) {
    Column col = make_column(f.type);
    for (size_t r = 0; r < rows; ++r) {
      switch (f.type) {
        case DataType::kFloat64:
          if (f.name == "g") {
            append_value(col, static_cast<double>(rng.integer(1, 3)));
          } else {
            append_value(col, rng.chance(0.3) ? rng.grid() : rng.uniform(-0.5, 4.5));
          }
          break;
        case DataType::kInt64: append_value(col, rng.integer(-5, 5)); break;
        case DataType::kBool: append_value(col, rng.chance(0.5)); break;
        case DataType::kString:
          append_value(col, rng.chance(0.1) ? std::string("purple") : rng.pick(categories()));
          break;
      }
    }
    columns.push_back(std::move(col));
  }
  return Table(schema, std::move(columns));
}

ModelPipeline random_tree_model(Rng& rng, const Schema& schema, const ModelShape& shape) {
  ModelPipeline m;
  m.name = "m";
  std::vector<std::string> features;
  random_inputs(rng, schema, shape, m, features);
  TreeEnsemble e;
  e.inputs = features;
  const int64_t trees = rng.integer(1, static_cast<int64_t>(shape.max_trees));
  for (int64_t t = 0; t < trees; ++t) {
    e.trees.push_back(random_tree(rng, features, static_cast<int>(rng.integer(1, shape.max_depth + 1))));
  }
  e.aggregate = rng.chance(0.3) ? Aggregate::kAvg : Aggregate::kSum;
  e.link = rng.chance(0.4) ? Link::kSigmoid : Link::kIdentity;
  m.core = std::move(e);
  validate_model(m);
  return m;
}

ModelPipeline random_model(Rng& rng, const Schema& schema, const ModelShape& shape) {
  if (!shape.allow_linear || rng.chance(0.75)) return random_tree_model(rng, schema, shape);
  ModelPipeline m;
  m.name = "m";
  std::vector<std::string> features;
  random_inputs(rng, schema, shape, m, features);
  LinearModel lin;
  for (const auto& f : features) {
    lin.inputs.push_back(f);
    lin.weights.push_back(rng.chance(0.2) ? 0.0 : rng.uniform(-2.0, 2.0));
  }
  lin.intercept = rng.uniform(-1.0, 1.0);
  lin.link = rng.chance(0.5) ? Link::kSigmoid : Link::kIdentity;
  m.core = std::move(lin);
  validate_model(m);
  return m;
}

Expr random_predicate(Rng& rng, const Schema& schema) {
  const auto floats = float_columns(schema);
  static const std::vector<CmpOp> kOps = {CmpOp::kLt, CmpOp::kLe, CmpOp::kGt, CmpOp::kGe, CmpOp::kEq, CmpOp::kNe};
  auto comparison = [&]() -> Expr {
    const double roll = rng.uniform(0.0, 1.0);
    if (roll < 0.1 && schema.contains("s")) {
      return ex::cmp(rng.chance(0.7) ? CmpOp::kEq : CmpOp::kNe, ex::col("s"), ex::lit(rng.pick(categories())));
    }
    if (roll < 0.2 && schema.contains("k")) {
      return ex::cmp(rng.pick(kOps), ex::col("k"), ex::lit(rng.integer(-3, 3)));
    }
    if (roll < 0.25) return ex::cmp(rng.pick(kOps), ex::col(rng.pick(floats)), ex::col(rng.pick(floats)));
    const CmpOp op = rng.pick(kOps);
    Expr c = ex::col(rng.pick(floats));
    Expr lit = ex::lit(rng.chance(0.85) ? rng.grid() : rng.uniform(0.0, 4.0));
    return rng.chance(0.2) ? ex::cmp(flip(op), lit, c) : ex::cmp(op, c, lit);
  };
  std::vector<Expr> terms;
  const int64_t n = rng.integer(1, 3);
  for (int64_t i = 0; i < n; ++i) {
    const double roll = rng.uniform(0.0, 1.0);
    if (roll < 0.1) {
      terms.push_back(ex::or_({comparison(), comparison()}));
    } else if (roll < 0.15) {
      terms.push_back(ex::not_(comparison()));
    } else {
      terms.push_back(comparison());
    }
  }
  return terms.size() == 1 ? terms[0] : ex::and_(std::move(terms));
}

DomainConstraints random_domain(Rng& rng, const ModelPipeline& m) {
  DomainConstraints d;
  for (const auto& in : m.raw_inputs) {
    if (in.type != DataType::kFloat64 || !rng.chance(0.6)) continue;
    double lo = rng.grid(), hi = rng.grid();
    if (lo > hi) std::swap(lo, hi);
    const bool lo_closed = rng.chance(0.5), hi_closed = rng.chance(0.5);
    const bool open_lo = rng.chance(0.2), open_hi = rng.chance(0.2);
    if (lo == hi && !(lo_closed && hi_closed)) continue;
    d.add(in.name, Interval(open_lo ? -kInf : lo, open_lo ? false : lo_closed, open_hi ? kInf : hi,
                            open_hi ? false : hi_closed));
  }
  return d;
}

RowBinding conforming_row(Rng& rng, const ModelPipeline& m, const DomainConstraints& d) {
  RowBinding row;
  for (const auto& in : m.raw_inputs) {
    if (in.type == DataType::kString) {
      row[in.name] = rng.chance(0.1) ? std::string("purple") : rng.pick(categories());
      continue;
    }
    const auto iv = d.interval_for(in.name);
    const Interval box = iv ? *iv : Interval::all();
    const double lo = std::isinf(box.lo()) ? -1.0 : box.lo();
    const double hi = std::isinf(box.hi()) ? 5.0 : box.hi();
    double v = lo;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double roll = rng.uniform(0.0, 1.0);
      if (roll < 0.25) {
        v = lo;
      } else if (roll < 0.5) {
        v = hi;
      } else if (roll < 0.6) {
        v = std::nextafter(lo, kInf);
      } else if (roll < 0.7) {
        v = std::nextafter(hi, -kInf);
      } else if (roll < 0.85) {
        v = rng.grid();
      } else {
        v = rng.uniform(lo, hi);
      }
      if (box.contains(v)) break;
      v = lo;
    }
    if (!box.contains(v)) v = (lo + hi) / 2.0;
    row[in.name] = v;
  }
  return row;
}

RandomPipeline random_pipeline(Rng& rng, size_t rows, const ModelShape& shape) {
  RandomPipeline p;
  TableShape ts;
  ts.float_columns = static_cast<size_t>(rng.integer(3, 26));
  Schema schema = random_schema(ts);
  p.table = random_table(rng, schema, rows);

  Plan plan = plan::scan(p.table_name, schema.names());
  Schema visible = schema;
  // A standalone Featurize whose output the model reads as a raw input.
  std::string featurized;
  if (shape.allow_featurizers && rng.chance(0.2)) {
    Scale sc;
    sc.input = "c0";
    sc.mean = rng.grid();
    sc.stddev = 2.0;
    sc.output = "c0_f";
    featurized = sc.output;
    plan = plan::featurize(plan, sc);
    std::vector<Field> fields = visible.fields();
    fields.push_back({featurized, DataType::kFloat64});
    visible = Schema(std::move(fields));
  }
  if (rng.chance(0.8)) plan = plan::filter(plan, random_predicate(rng, schema));

  ModelPipeline m = random_model(rng, visible, shape);
  std::vector<std::string> bound;
  for (const auto& in : m.raw_inputs) bound.push_back(in.name);
  p.model = std::make_shared<const ModelPipeline>(m);
  plan = plan::predict(plan, ModelRef{"m", 1, ""}, p.model, bound, "score");

  std::vector<ProjectItem> items;
  if (rng.chance(0.5)) items.push_back({ex::col("k"), "k"});
  if (rng.chance(0.3)) items.push_back({ex::col(schema[0].name), schema[0].name});
  if (rng.chance(0.2) && !featurized.empty()) items.push_back({ex::col(featurized), featurized});
  items.push_back({ex::col("score"), "score"});
  if (rng.chance(0.2)) {
    items.push_back({ex::arith(ArithOp::kMul, ex::col("score"), ex::lit(2.0)), "score2"});
  }
  p.plan = plan::project(plan, std::move(items));
  return p;
}

}  // namespace inferq::testing
