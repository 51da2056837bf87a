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

#include <cmath>
#include <cstring>
#include <functional>

#include <gtest/gtest.h>

#include "inferq/error.h"
#include "inferq/expr.h"
#include "inferq/model.h"
#include "support/generators.h"

namespace inferq {
namespace {

using testing::Rng;

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

ModelPipeline linear(std::vector<std::pair<std::string, double>> weights, double intercept,
                     Link link = Link::kIdentity) {
  ModelPipeline m;
  m.name = "lin";
  LinearModel lin;
  for (auto& [name, w] : weights) {
    m.raw_inputs.push_back({name, DataType::kFloat64});
    lin.inputs.push_back(name);
    lin.weights.push_back(w);
  }
  lin.intercept = intercept;
  lin.link = link;
  m.core = lin;
  return m;
}

ModelPipeline ensemble(std::vector<std::string> inputs, std::vector<TreePtr> trees,
                       Aggregate agg = Aggregate::kSum) {
  ModelPipeline m;
  m.name = "ens";
  for (const auto& in : inputs) m.raw_inputs.push_back({in, DataType::kFloat64});
  TreeEnsemble e;
  e.inputs = std::move(inputs);
  e.trees = std::move(trees);
  e.aggregate = agg;
  m.core = e;
  return m;
}

TreePtr leaf(double v) { return TreeNode::leaf(v); }
TreePtr split(const std::string& f, double t, TreePtr l, TreePtr r) {
  return TreeNode::split(f, t, std::move(l), std::move(r));
}

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kUsage;
}

TEST(EvalModel, LinearIdentity) {
  auto m = linear({{"a", 2}, {"b", 3}}, 1);
  validate_model(m);
  EXPECT_EQ(eval_model(m, {{"a", 1.0}, {"b", 1.0}}), 6.0);
}

TEST(EvalModel, AverageOfLeaves) {
  auto m = ensemble({"x"}, {leaf(1.0), leaf(3.0)}, Aggregate::kAvg);
  EXPECT_EQ(eval_model(m, {{"x", 0.0}}), 2.0);
}

TEST(EvalModel, SigmoidLinkOverLinearScore) {
  auto m = linear({{"a", 1}}, 0, Link::kSigmoid);
  // 1 / (1 + e^-2) to 20 significant digits.
  EXPECT_DOUBLE_EQ(eval_model(m, {{"a", 2.0}}), 0.88079707797788244406);
}

TEST(EvalModel, SplitTiesGoRight) {
  auto m = ensemble({"x"}, {split("x", 5, leaf(1), leaf(0))});
  EXPECT_EQ(eval_model(m, {{"x", 4.999}}), 1.0);
  EXPECT_EQ(eval_model(m, {{"x", 5.0}}), 0.0);
}

TEST(EvalModel, FeaturizersAndUnknownCategory) {
  ModelPipeline m;
  m.name = "f";
  m.raw_inputs = {{"city", DataType::kString}, {"inc", DataType::kFloat64}};
  m.featurizers.push_back(OneHot{"city", {"a", "b"}, {"city_a", "city_b"}});
  m.featurizers.push_back(Scale{"inc", 10.0, 2.0, "inc_z"});
  LinearModel lin;
  lin.inputs = {"city_a", "city_b", "inc_z"};
  lin.weights = {1.0, 10.0, 100.0};
  m.core = lin;
  validate_model(m);
  EXPECT_EQ(eval_model(m, {{"city", std::string("b")}, {"inc", 12.0}}), 110.0);
  EXPECT_EQ(eval_model(m, {{"city", std::string("zzz")}, {"inc", 10.0}}), 0.0);
}

TEST(EvalModel, MissingFeature) {
  auto m = linear({{"a", 2}}, 1);
  EXPECT_EQ(error_of([&] { eval_model(m, {}); }), ErrorCode::kMissingFeature);
}

TEST(ValidateModel, RejectsBrokenInvariants) {
  auto undeclared = ensemble({"x"}, {split("y", 1, leaf(0), leaf(1))});
  EXPECT_EQ(error_of([&] { validate_model(undeclared); }), ErrorCode::kValidationError);

  auto lin = linear({{"a", 1}}, 0);
  std::get<LinearModel>(lin.core).weights.push_back(2.0);
  EXPECT_EQ(error_of([&] { validate_model(lin); }), ErrorCode::kValidationError);

  auto no_trees = ensemble({"x"}, {});
  EXPECT_EQ(error_of([&] { validate_model(no_trees); }), ErrorCode::kValidationError);

  ModelPipeline dup_cat;
  dup_cat.name = "d";
  dup_cat.raw_inputs = {{"c", DataType::kString}};
  dup_cat.featurizers.push_back(OneHot{"c", {"a", "a"}, {"c_a", "c_a2"}});
  LinearModel l2;
  l2.inputs = {"c_a"};
  l2.weights = {1.0};
  dup_cat.core = l2;
  EXPECT_EQ(error_of([&] { validate_model(dup_cat); }), ErrorCode::kValidationError);

  ModelPipeline bad_scale;
  bad_scale.name = "s";
  bad_scale.raw_inputs = {{"x", DataType::kFloat64}};
  bad_scale.featurizers.push_back(Scale{"x", 0.0, 0.0, "x_z"});
  LinearModel l3;
  l3.inputs = {"x_z"};
  l3.weights = {1.0};
  bad_scale.core = l3;
  EXPECT_EQ(error_of([&] { validate_model(bad_scale); }), ErrorCode::kValidationError);

  ModelPipeline unproducible = linear({{"a", 1}}, 0);
  std::get<LinearModel>(unproducible.core).inputs = {"zzz"};
  EXPECT_EQ(error_of([&] { validate_model(unproducible); }), ErrorCode::kValidationError);
}

TEST(UsedFeatures, ZeroWeightsDropOut) {
  auto m = linear({{"a", 0.5}, {"b", 0.0}, {"c", 2.0}}, 0);
  EXPECT_EQ(used_features(m), (std::set<std::string>{"a", "c"}));
  EXPECT_TRUE(used_features(linear({{"a", 0.0}}, 4)).empty());
}

TEST(UsedFeatures, TreeSplitsOnly) {
  auto m = ensemble({"age", "income"}, {split("age", 60, leaf(0), leaf(1)), split("age", 30, leaf(2), leaf(3))});
  EXPECT_EQ(used_features(m), std::set<std::string>{"age"});
}

ModelPipeline city_model() {
  ModelPipeline m;
  m.name = "city";
  m.raw_inputs = {{"city", DataType::kString}, {"x", DataType::kFloat64}};
  m.featurizers.push_back(OneHot{"city", {"a", "b", "c"}, {"city_a", "city_b", "city_c"}});
  LinearModel lin;
  lin.inputs = {"city_a", "city_b", "city_c", "x"};
  lin.weights = {0.0, 0.0, 0.0, 1.5};
  lin.intercept = 0.25;
  m.core = lin;
  validate_model(m);
  return m;
}

TEST(UsedFeatures, ZeroWeightOneHotExcluded) {
  auto m = city_model();
  EXPECT_EQ(used_features(m), std::set<std::string>{"x"});
  // Perturbation oracle: changing city never moves the output.
  Rng rng(3);
  const std::vector<std::string> cities = {"a", "b", "c", "q"};
  for (int i = 0; i < 1000; ++i) {
    RowBinding row{{"city", rng.pick(cities)}, {"x", rng.uniform(-10, 10)}};
    const double base = eval_model(m, row);
    row["city"] = rng.pick(cities);
    EXPECT_TRUE(same_bits(base, eval_model(m, row)));
  }
}

TEST(UsedFeatures, PerturbationFuzz) {
  Rng rng(17);
  const Schema schema = testing::random_schema({});
  for (int i = 0; i < 200; ++i) {
    const auto m = testing::random_model(rng, schema, {});
    const auto used = used_features(m);
    for (int r = 0; r < 50; ++r) {
      RowBinding row = testing::conforming_row(rng, m, {});
      const double base = eval_model(m, row);
      for (const auto& in : m.raw_inputs) {
        if (used.count(in.name)) continue;
        RowBinding moved = row;
        if (in.type == DataType::kString) {
          moved[in.name] = std::string("purple");
        } else {
          moved[in.name] = rng.uniform(-10, 10);
        }
        ASSERT_TRUE(same_bits(base, eval_model(m, moved))) << in.name;
      }
    }
  }
}

TEST(Prune, UnreachableLeftBranch) {
  auto m = ensemble({"x"}, {split("x", 5, leaf(1), leaf(0))});
  DomainConstraints d;
  d.add("x", Interval(5, true, kInf, false));
  auto p = prune_with_domain(m, d);
  const auto& e = std::get<TreeEnsemble>(p.core);
  ASSERT_TRUE(e.trees[0]->is_leaf());
  EXPECT_EQ(e.trees[0]->value, 0.0);
}

TEST(Prune, NestedIntervalCollapsesToOneLeaf) {
  auto m = ensemble({"x"}, {split("x", 5, split("x", 3, leaf(10), leaf(20)), leaf(30))});
  DomainConstraints d;
  d.add("x", Interval(3, true, 5, false));
  auto p = prune_with_domain(m, d);
  EXPECT_EQ(node_count(m), 5u);
  EXPECT_EQ(node_count(p), 1u);
  // Grid oracle x = 3.00, 3.01, ..., 4.99.
  for (int i = 300; i < 500; ++i) {
    const double x = i / 100.0;
    EXPECT_EQ(eval_model(p, {{"x", x}}), eval_model(m, {{"x", x}}));
    EXPECT_EQ(eval_model(p, {{"x", x}}), 20.0);
  }
}

TEST(Prune, EmptyDomainIsIdentity) {
  Rng rng(5);
  const Schema schema = testing::random_schema({});
  for (int i = 0; i < 50; ++i) {
    auto m = testing::random_model(rng, schema, {});
    EXPECT_TRUE(model_equal(prune_with_domain(m, {}), m));
  }
}

TEST(Prune, LinearCoresUnchanged) {
  auto m = linear({{"a", 1}, {"b", 2}}, 0);
  DomainConstraints d;
  d.add("a", Interval::point(1));
  EXPECT_TRUE(model_equal(prune_with_domain(m, d), m));
}

TEST(Prune, SoundMonotoneAndIdempotentFuzz) {
  Rng rng(23);
  const Schema schema = testing::random_schema({});
  for (int i = 0; i < 200; ++i) {
    const auto m = testing::random_tree_model(rng, schema, {});
    const auto d = testing::random_domain(rng, m);
    const auto p = prune_with_domain(m, d);
    EXPECT_NO_THROW(validate_model(p));
    EXPECT_LE(node_count(p), node_count(m));
    EXPECT_TRUE(model_equal(prune_with_domain(p, d), p));
    for (int r = 0; r < 200; ++r) {
      const auto row = testing::conforming_row(rng, m, d);
      ASSERT_TRUE(same_bits(eval_model(p, row), eval_model(m, row))) << "model " << i;
    }
    // Tightening to a point inside the domain never grows the model.
    DomainConstraints tighter = d;
    const auto row = testing::conforming_row(rng, m, d);
    const std::string& first = m.raw_inputs.front().name;
    tighter.add(first, Interval::point(as_double(row.at(first))));
    EXPECT_LE(node_count(prune_with_domain(m, tighter)), node_count(p));
  }
}

TEST(NodeCount, LeafAndStump) {
  auto single = ensemble({"x"}, {leaf(1)});
  EXPECT_EQ(node_count(single), 1u);
  EXPECT_EQ(depth(single), 1u);
  auto stump = ensemble({"x"}, {split("x", 5, leaf(1), leaf(0))});
  EXPECT_EQ(node_count(stump), 3u);
  EXPECT_EQ(depth(stump), 2u);
  EXPECT_EQ(node_count(linear({{"a", 1}}, 0)), 0u);
}

TEST(DropUnused, RemovesDeadInputsAndFeaturizers) {
  auto m = city_model();
  auto d = drop_unused_inputs(m);
  EXPECT_NO_THROW(validate_model(d));
  ASSERT_EQ(d.raw_inputs.size(), 1u);
  EXPECT_EQ(d.raw_inputs[0].name, "x");
  EXPECT_TRUE(d.featurizers.empty());
  EXPECT_EQ(eval_model(d, {{"x", 2.0}}), eval_model(m, {{"x", 2.0}, {"city", std::string("a")}}));
}

TEST(DropUnused, PreservesOutputFuzz) {
  Rng rng(29);
  const Schema schema = testing::random_schema({});
  for (int i = 0; i < 200; ++i) {
    const auto m = testing::random_model(rng, schema, {});
    const auto d = drop_unused_inputs(m);
    EXPECT_NO_THROW(validate_model(d));
    const auto used = used_features(m);
    EXPECT_EQ(d.raw_inputs.size(), used.size());
    for (int r = 0; r < 20; ++r) {
      const auto row = testing::conforming_row(rng, m, {});
      ASSERT_TRUE(same_bits(eval_model(d, row), eval_model(m, row)));
    }
  }
}

std::map<std::string, Expr> bind_columns(const ModelPipeline& m) {
  std::map<std::string, Expr> out;
  for (const auto& in : m.raw_inputs) out.emplace(in.name, ex::col(in.name));
  return out;
}

TEST(Inline, StumpBecomesCase) {
  auto m = ensemble({"x"}, {split("x", 5, leaf(1), leaf(0))});
  Expr want = ex::case_({{ex::cmp(CmpOp::kLt, ex::col("x"), ex::lit(5.0)), ex::lit(1.0)}}, ex::lit(0.0));
  EXPECT_EQ(inline_to_expr(m, bind_columns(m)), want);
}

TEST(Inline, LinearSumInDeclarationOrder) {
  auto m = linear({{"a", 2}, {"b", 3}}, 1);
  Expr want = ex::arith(ArithOp::kAdd,
                        ex::arith(ArithOp::kAdd, ex::lit(1.0), ex::arith(ArithOp::kMul, ex::lit(2.0), ex::col("a"))),
                        ex::arith(ArithOp::kMul, ex::lit(3.0), ex::col("b")));
  EXPECT_EQ(inline_to_expr(m, bind_columns(m)), want);
  EXPECT_EQ(to_string(want), "1.0 + 2.0 * a + 3.0 * b");
}

TEST(Inline, SkipsZeroWeights) {
  auto m = linear({{"a", 0}, {"b", 3}}, 1);
  EXPECT_EQ(referenced_columns(inline_to_expr(m, bind_columns(m))), std::set<std::string>{"b"});
}

TEST(Inline, SumOfTwoTreesIsAddition) {
  auto m = ensemble({"x"}, {split("x", 1, leaf(1), leaf(2)), split("x", 2, leaf(3), leaf(4))});
  Expr e = inline_to_expr(m, bind_columns(m));
  const auto* a = std::get_if<Arith>(&e.node().v);
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->op, ArithOp::kAdd);
  EXPECT_TRUE(std::holds_alternative<Case>(a->lhs.node().v));
  EXPECT_TRUE(std::holds_alternative<Case>(a->rhs.node().v));
}

TEST(Inline, BitIdenticalFuzz) {
  Rng rng(31);
  const Schema schema = testing::random_schema({});
  for (int i = 0; i < 200; ++i) {
    const auto m = testing::random_model(rng, schema, {});
    const Expr e = inline_to_expr(m, bind_columns(m));
    for (int r = 0; r < 100; ++r) {
      const auto row = testing::conforming_row(rng, m, {});
      const Value v = eval_expr(e, row);
      ASSERT_TRUE(same_bits(std::get<double>(v), eval_model(m, row))) << to_string(e);
    }
  }
}

TEST(Inline, BindingsSubstituteExpressions) {
  auto m = linear({{"a", 2}}, 0);
  std::map<std::string, Expr> b{{"a", ex::arith(ArithOp::kAdd, ex::col("p"), ex::col("q"))}};
  Expr e = inline_to_expr(m, b);
  EXPECT_EQ(referenced_columns(e), (std::set<std::string>{"p", "q"}));
  EXPECT_EQ(std::get<double>(eval_expr(e, {{"p", 1.0}, {"q", 2.0}})), 6.0);
}

}  // namespace
}  // namespace inferq
