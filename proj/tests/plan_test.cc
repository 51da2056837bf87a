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

#include <functional>
#include <memory>

#include <gtest/gtest.h>

#include "inferq/error.h"
#include "inferq/plan.h"
#include "support/generators.h"

namespace inferq {
namespace {

using ex::col;
using ex::lit;

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kUsage;
}

std::shared_ptr<const ModelPipeline> two_input_model() {
  ModelPipeline m;
  m.name = "churn";
  m.raw_inputs = {{"age", DataType::kFloat64}, {"income", DataType::kFloat64}};
  LinearModel lin;
  lin.inputs = {"age", "income"};
  lin.weights = {1.0, 2.0};
  m.core = lin;
  return std::make_shared<const ModelPipeline>(m);
}

const std::map<std::string, Schema>& tables() {
  static const std::map<std::string, Schema> kTables = {
      {"t", Schema({{"x", DataType::kFloat64}, {"s", DataType::kString}})},
      {"customers", Schema({{"age", DataType::kFloat64}, {"income", DataType::kFloat64},
                            {"plan", DataType::kString}})},
  };
  return kTables;
}

TEST(Validate, FilterPreservesSchema) {
  Plan p = plan::filter(plan::scan("t", {"x"}), ex::cmp(CmpOp::kLt, col("x"), lit(5.0)));
  EXPECT_EQ(validate(p, tables()), Schema({{"x", DataType::kFloat64}}));
}

TEST(Validate, ProjectArithmeticType) {
  Plan p = plan::project(plan::scan("t", {"x"}), {{ex::arith(ArithOp::kMul, col("x"), lit(2.0)), "y"}});
  EXPECT_EQ(validate(p, tables()), Schema({{"y", DataType::kFloat64}}));
}

TEST(Validate, PredictArityMismatch) {
  Plan p = plan::predict(plan::scan("customers", {"age"}), {"churn", 1, ""}, two_input_model(), {"age"}, "score");
  EXPECT_EQ(error_of([&] { validate(p, tables()); }), ErrorCode::kArityMismatch);
}

TEST(Validate, PredictTypeMismatch) {
  Plan p = plan::predict(plan::scan("customers", {"age", "plan"}), {"churn", 1, ""}, two_input_model(),
                         {"age", "plan"}, "score");
  EXPECT_EQ(error_of([&] { validate(p, tables()); }), ErrorCode::kTypeMismatch);
}

TEST(Validate, PredictThroughLookup) {
  Plan p = plan::predict(plan::scan("customers", {"age", "income"}), {"churn", 1, ""}, nullptr,
                         {"age", "income"}, "score");
  EXPECT_EQ(error_of([&] { validate(p, tables()); }), ErrorCode::kUnknownModel);
  auto m = two_input_model();
  ModelLookup lookup = [&](const ModelRef& r) { return r.name == "churn" ? m : nullptr; };
  EXPECT_EQ(validate(p, tables(), lookup).size(), 3u);
  Plan bound = bind_models(p, lookup);
  EXPECT_EQ(std::get<PredictNode>(bound.node().v).model, m);
}

TEST(Validate, StructuralErrors) {
  EXPECT_EQ(error_of([] { validate(plan::scan("nope", {"x"}), tables()); }), ErrorCode::kUnknownTable);
  EXPECT_EQ(error_of([] { validate(plan::scan("t", {"y"}), tables()); }), ErrorCode::kUnknownColumn);
  EXPECT_EQ(error_of([] { validate(plan::scan("t", {}), tables()); }), ErrorCode::kValidationError);
  EXPECT_EQ(error_of([] { validate(plan::scan("t", {"x", "x"}), tables()); }), ErrorCode::kDuplicateColumn);
  EXPECT_EQ(error_of([] { validate(plan::filter(plan::scan("t", {"x"}), col("x")), tables()); }),
            ErrorCode::kTypeMismatch);
  EXPECT_EQ(error_of([] {
              validate(plan::filter(plan::scan("t", {"x", "s"}), ex::cmp(CmpOp::kLt, col("s"), lit(1.0))), tables());
            }),
            ErrorCode::kTypeMismatch);
  EXPECT_EQ(error_of([] { validate(plan::route_input(), tables()); }), ErrorCode::kValidationError);
  EXPECT_EQ(error_of([] {
              validate(plan::featurize(plan::scan("t", {"x"}), Scale{"x", 0, 1, "x"}), tables());
            }),
            ErrorCode::kDuplicateColumn);
}

TEST(Validate, ErrorsNameTheNode) {
  try {
    validate(plan::filter(plan::scan("t", {"x"}), ex::cmp(CmpOp::kLt, col("zz"), lit(1.0))), tables());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("Filter [zz < 1.0]"), std::string::npos) << e.what();
  }
}

TEST(Validate, RouteUnionBranchesMustAgree) {
  auto m = two_input_model();
  Plan in = plan::scan("customers", {"age", "income"});
  Plan branch = plan::predict(plan::route_input(), {"churn", 1, "a"}, m, {"age", "income"}, "score");
  Plan good = plan::route_union(in, "age", {{{Value(1.0)}, branch}}, branch);
  EXPECT_EQ(validate(good, tables()).names(), (std::vector<std::string>{"age", "income", "score"}));
  Plan other = plan::predict(plan::route_input(), {"churn", 1, "a"}, m, {"age", "income"}, "other");
  Plan bad = plan::route_union(in, "age", {{{Value(1.0)}, other}}, branch);
  EXPECT_EQ(error_of([&] { validate(bad, tables()); }), ErrorCode::kValidationError);
  Plan bad_value = plan::route_union(in, "age", {{{Value(std::string("x"))}, branch}}, branch);
  EXPECT_EQ(error_of([&] { validate(bad_value, tables()); }), ErrorCode::kTypeMismatch);
}

TEST(Explain, OneNodePerLineIndented) {
  Plan p = plan::scan("customers", {"age", "income"});
  p = plan::filter(p, ex::cmp(CmpOp::kGe, col("age"), lit(60.0)));
  p = plan::predict(p, {"churn", 3, ""}, two_input_model(), {"age", "income"}, "score", Strategy::kVector);
  p = plan::project(p, {{col("score"), "score"}});
  EXPECT_EQ(explain(p),
            "Project [score]\n"
            "  Predict [model=churn@3, strategy=VECTOR, in=(age,income), out=score]\n"
            "    Filter [age >= 60.0]\n"
            "      Scan [customers, columns=(age,income)]\n");
}

TEST(Explain, ComputedProjectItems) {
  Plan p = plan::project(plan::scan("t", {"x"}), {{ex::arith(ArithOp::kMul, col("x"), lit(2.0)), "y"}});
  EXPECT_EQ(node_label(p), "Project [y := x * 2.0]");
}

TEST(Fingerprint, EqualForIdenticalPlans) {
  auto build = [](double v) {
    return plan::project(plan::filter(plan::scan("t", {"x"}), ex::cmp(CmpOp::kLt, col("x"), lit(v))),
                         {{col("x"), "x"}});
  };
  EXPECT_EQ(fingerprint(build(5.0)), fingerprint(build(5.0)));
  EXPECT_NE(fingerprint(build(5.0)), fingerprint(build(5.5)));
}

TEST(Fingerprint, SeesModelContentAndStrategy) {
  auto m1 = two_input_model();
  auto changed = std::make_shared<ModelPipeline>(*m1);
  std::get<LinearModel>(changed->core).weights[1] = 2.5;
  Plan in = plan::scan("customers", {"age", "income"});
  auto pred = [&](std::shared_ptr<const ModelPipeline> m, std::optional<Strategy> s) {
    return plan::predict(in, {"churn", 1, ""}, std::move(m), {"age", "income"}, "score", s);
  };
  EXPECT_NE(fingerprint(pred(m1, std::nullopt)), fingerprint(pred(changed, std::nullopt)));
  EXPECT_NE(fingerprint(pred(m1, Strategy::kInline)), fingerprint(pred(m1, Strategy::kVector)));
}

TEST(PlanHelpers, InputWithInputAndFindScan) {
  Plan s = plan::scan("t", {"x"});
  Plan f = plan::filter(s, ex::cmp(CmpOp::kLt, col("x"), lit(5.0)));
  EXPECT_TRUE(f.input().same(s));
  EXPECT_FALSE(s.input().valid());
  Plan s2 = plan::scan("t", {"x", "s"});
  Plan f2 = f.with_input(s2);
  EXPECT_TRUE(f2.input().same(s2));
  EXPECT_EQ(find_scan(f2)->columns.size(), 2u);
  int nodes = 0;
  visit_plan(f2, [&](const Plan&) { ++nodes; });
  EXPECT_EQ(nodes, 2);
}

TEST(PlanProperty, RandomPipelinesValidate) {
  testing::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    auto rp = testing::random_pipeline(rng, 4, {});
    std::map<std::string, Schema> schemas{{rp.table_name, rp.table.schema()}};
    ASSERT_NO_THROW(validate(rp.plan, schemas)) << explain(rp.plan);
    EXPECT_EQ(fingerprint(rp.plan), fingerprint(rp.plan));
  }
}

}  // namespace
}  // namespace inferq
