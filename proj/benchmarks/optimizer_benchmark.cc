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
#include <string>

#include "inferq/executor.h"
#include "inferq/model.h"
#include "inferq/model_source.h"
#include "inferq/optimizer.h"
#include "inferq/query.h"
#include "inferq/stats.h"
#include "inferq/workload.h"

namespace inferq {
namespace {

struct Fixture {
  std::map<std::string, Table> tables;
  StatsMap stats;
  Plan plan;
};

Fixture churn_fixture(size_t rows) {
  ChurnOptions o;
  o.rows = rows;
  o.features = 100;
  o.trees = 20;
  const Workload w = churn_workload(o);
  Fixture f;
  f.tables.emplace(w.table_name, w.table);
  f.stats.emplace(w.table_name, analyze(w.table, w.table_name));
  StaticModelSource models;
  models.add(w.model);
  f.plan = lower(parse_query(w.query), models, {{w.table_name, w.table.schema()}});
  return f;
}

void BM_Optimize(benchmark::State& state) {
  const Fixture f = churn_fixture(1000);
  for (auto _ : state) benchmark::DoNotOptimize(optimize(f.plan, f.stats, OptimizerConfig{}));
}
BENCHMARK(BM_Optimize);

void BM_PruneWithDomain(benchmark::State& state) {
  ChurnOptions o;
  o.trees = static_cast<size_t>(state.range(0));
  const ModelPipeline m = churn_model(o);
  const auto d = derive_domain(ex::cmp(CmpOp::kGe, ex::col("f0"), ex::lit(0.1)));
  for (auto _ : state) benchmark::DoNotOptimize(prune_with_domain(m, d));
}
BENCHMARK(BM_PruneWithDomain)->Arg(10)->Arg(100);

// Arg 0 runs the unoptimized plan, arg 1 the fully optimized one.
void BM_Execute(benchmark::State& state) {
  const Fixture f = churn_fixture(100000);
  const Plan plan = state.range(0) ? optimize(f.plan, f.stats, OptimizerConfig{}).plan : f.plan;
  for (auto _ : state) benchmark::DoNotOptimize(execute(plan, f.tables));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_Execute)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace inferq

BENCHMARK_MAIN();
