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

#include "inferq/workload.h"

#include <random>

namespace inferq {

namespace {

TreePtr random_subtree(std::mt19937_64& rng, const std::vector<std::string>& features, int depth,
                       double leaf_scale) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (depth == 1) return TreeNode::leaf((unit(rng) * 2.0 - 1.0) * leaf_scale);
  std::uniform_int_distribution<size_t> pick(0, features.size() - 1);
  const std::string& f = features[pick(rng)];
  const double threshold = unit(rng);
  TreePtr left = random_subtree(rng, features, depth - 1, leaf_scale);
  TreePtr right = random_subtree(rng, features, depth - 1, leaf_scale);
  return TreeNode::split(f, threshold, std::move(left), std::move(right));
}

std::string predict_query(const std::string& model, const std::vector<std::string>& args,
                          const std::string& table, const std::string& where) {
  std::string q = "SELECT PREDICT(" + model;
  for (const auto& a : args) q += ", " + a;
  q += ") AS score FROM " + table;
  if (!where.empty()) q += " WHERE " + where;
  return q;
}

}  // namespace

ModelPipeline churn_model(const ChurnOptions& options) {
  std::mt19937_64 rng(options.seed);
  ModelPipeline m;
  m.name = "churn";
  TreeEnsemble e;
  for (size_t i = 0; i < options.features; ++i) {
    const std::string name = "f" + std::to_string(i);
    m.raw_inputs.push_back({name, DataType::kFloat64});
    e.inputs.push_back(name);
  }
  const std::vector<std::string> inner = {"f1", "f2", "f3", "f4"};
  const double scale = 1.0 / static_cast<double>(options.trees);
  for (size_t t = 0; t < options.trees; ++t) {
    TreePtr left = random_subtree(rng, inner, 6, scale);
    TreePtr right = random_subtree(rng, inner, 6, scale);
    e.trees.push_back(TreeNode::split("f0", 0.1, std::move(left), std::move(right)));
  }
  e.link = Link::kSigmoid;
  m.core = std::move(e);
  return m;
}

Table churn_table(const ChurnOptions& options) {
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Field> fields;
  std::vector<Column> columns;
  for (size_t i = 0; i < options.features; ++i) {
    fields.push_back({"f" + std::to_string(i), DataType::kFloat64});
    std::vector<double> col(options.rows);
    for (auto& v : col) v = unit(rng);
    columns.push_back(std::move(col));
  }
  return Table(Schema(std::move(fields)), std::move(columns));
}

Workload churn_workload(const ChurnOptions& options) {
  Workload w;
  w.table_name = "synth";
  w.table = churn_table(options);
  w.model = std::make_shared<const ModelPipeline>(churn_model(options));
  std::vector<std::string> args;
  for (size_t i = 0; i < options.features; ++i) args.push_back("f" + std::to_string(i));
  w.query = predict_query("churn", args, w.table_name, "f0 >= 0.1");
  return w;
}

ModelPipeline region_model(const RegionOptions& options) {
  std::mt19937_64 rng(options.seed);
  ModelPipeline m;
  m.name = "regional";
  TreeEnsemble e;
  const std::vector<std::string> xs = {"x0", "x1", "x2", "x3", "x4"};
  m.raw_inputs.push_back({"region", DataType::kFloat64});
  e.inputs.push_back("region");
  for (const auto& x : xs) {
    m.raw_inputs.push_back({x, DataType::kFloat64});
    e.inputs.push_back(x);
  }
  const double scale = 1.0 / static_cast<double>(options.trees);
  for (size_t t = 0; t < options.trees; ++t) {
    TreePtr left = random_subtree(rng, xs, 5, scale);
    TreePtr right = random_subtree(rng, xs, 5, scale);
    e.trees.push_back(TreeNode::split("region", 1.5, std::move(left), std::move(right)));
  }
  m.core = std::move(e);
  return m;
}

Table region_table(const RegionOptions& options) {
  std::mt19937_64 rng(options.seed ^ 0x5851f42d4c957f2dULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<size_t> pick(0, options.regions.size() - 1);
  std::vector<double> region(options.rows);
  for (auto& r : region) r = options.regions[pick(rng)];
  std::vector<Field> fields = {{"region", DataType::kFloat64}};
  std::vector<Column> columns;
  columns.push_back(std::move(region));
  for (int i = 0; i < 5; ++i) {
    fields.push_back({"x" + std::to_string(i), DataType::kFloat64});
    std::vector<double> col(options.rows);
    for (auto& v : col) v = unit(rng);
    columns.push_back(std::move(col));
  }
  return Table(Schema(std::move(fields)), std::move(columns));
}

Workload region_workload(const RegionOptions& options) {
  Workload w;
  w.table_name = "regions";
  w.table = region_table(options);
  w.model = std::make_shared<const ModelPipeline>(region_model(options));
  w.query = predict_query("regional", {"region", "x0", "x1", "x2", "x3", "x4"}, w.table_name, "");
  return w;
}

}  // namespace inferq
