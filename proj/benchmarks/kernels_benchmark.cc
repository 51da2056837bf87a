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


#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "inferq/expr.h"
#include "inferq/kernels.h"
#include "inferq/model.h"
#include "inferq/table.h"
#include "inferq/workload.h"

namespace inferq {
namespace {

ChurnOptions small_churn(size_t rows, size_t trees) {
  ChurnOptions o;
  o.rows = rows;
  o.features = 5;
  o.trees = trees;
  return o;
}

std::vector<const Column*> raw_columns(const Table& t, const ModelPipeline& m) {
  std::vector<const Column*> out;
  for (const auto& in : m.raw_inputs) out.push_back(&t.column(in.name));
  return out;
}

void BM_PredictVector(benchmark::State& state) {
  const auto o = small_churn(static_cast<size_t>(state.range(0)), static_cast<size_t>(state.range(1)));
  const Table t = churn_table(o);
  const CompiledModel model(std::make_shared<const ModelPipeline>(churn_model(o)));
  const auto raw = raw_columns(t, model.model());
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(raw, t.num_rows()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PredictVector)->Args({4096, 1})->Args({4096, 10})->Args({4096, 100});

void BM_PredictInlined(benchmark::State& state) {
  const auto o = small_churn(static_cast<size_t>(state.range(0)), static_cast<size_t>(state.range(1)));
  const Table t = churn_table(o);
  const ModelPipeline m = churn_model(o);
  std::map<std::string, Expr> bindings;
  for (const auto& in : m.raw_inputs) bindings.emplace(in.name, ex::col(in.name));
  const CompiledExpr e(inline_to_expr(m, bindings), t.schema());
  std::vector<Column> cols;
  for (const auto& name : t.schema().names()) cols.push_back(t.column(name));
  const Batch b = make_batch(t.schema(), std::move(cols));
  for (auto _ : state) benchmark::DoNotOptimize(e.eval_column(b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PredictInlined)->Args({4096, 1})->Args({4096, 10});

void BM_EvalModelRowwise(benchmark::State& state) {
  const auto o = small_churn(1024, static_cast<size_t>(state.range(0)));
  const Table t = churn_table(o);
  const ModelPipeline m = churn_model(o);
  std::vector<RowBinding> rows(t.num_rows());
  for (const auto& in : m.raw_inputs) {
    const auto& col = std::get<std::vector<double>>(t.column(in.name));
    for (size_t r = 0; r < rows.size(); ++r) rows[r][in.name] = col[r];
  }
  for (auto _ : state) {
    double sum = 0.0;
    for (const auto& row : rows) sum += eval_model(m, row);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rows.size()));
}
BENCHMARK(BM_EvalModelRowwise)->Arg(1)->Arg(10);

}  // namespace
}  // namespace inferq
