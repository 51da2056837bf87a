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
#include <string>

#include <gtest/gtest.h>

#include "inferq/error.h"
#include "inferq/model_io.h"
#include "support/generators.h"

namespace inferq {
namespace {

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kUsage;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(LoadModel, LinearWithTwoWeights) {
  const auto m = load_model(R"({
    "name": "lin",
    "raw_inputs": [{"name": "a", "type": "FLOAT64"}, {"name": "b", "type": "FLOAT64"}],
    "featurizers": [],
    "core": {"kind": "linear", "weights": {"a": 2, "b": 3}, "intercept": 1, "link": "identity"}
  })");
  EXPECT_TRUE(m.featurizers.empty());
  ASSERT_TRUE(m.is_linear());
  const auto& lin = std::get<LinearModel>(m.core);
  EXPECT_EQ(lin.inputs, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(lin.weights, (std::vector<double>{2, 3}));
  EXPECT_EQ(eval_model(m, {{"a", 1.0}, {"b", 1.0}}), 6.0);
}

TEST(LoadModel, WeightOrderFollowsDocument) {
  const auto m = load_model(R"({"name": "z", "raw_inputs": [{"name": "b", "type": "FLOAT64"},
    {"name": "a", "type": "FLOAT64"}], "core": {"kind": "linear", "weights": {"b": 1, "a": 2}}})");
  EXPECT_EQ(std::get<LinearModel>(m.core).inputs, (std::vector<std::string>{"b", "a"}));
}

TEST(LoadModel, SplitOnUndeclaredFeature) {
  const char* doc = R"({"name": "e", "raw_inputs": [{"name": "x", "type": "FLOAT64"}],
    "core": {"kind": "tree_ensemble", "inputs": ["x"],
             "trees": [{"feature": "y", "threshold": 1, "left": {"leaf": 0}, "right": {"leaf": 1}}]}})";
  EXPECT_EQ(error_of([&] { load_model(doc); }), ErrorCode::kValidationError);
  EXPECT_NE(message_of([&] { load_model(doc); }).find("y"), std::string::npos);
}

TEST(LoadModel, FixtureModel) {
  const auto m = load_model_file(std::string(INFERQ_TEST_DATA_DIR) + "/churn/models/churn.json");
  EXPECT_EQ(m.name, "churn");
  EXPECT_EQ(m.featurizers.size(), 2u);
  EXPECT_EQ(node_count(m), 23u);
  EXPECT_EQ(transform_outputs(m.featurizers[0]), (std::vector<std::string>{"plan_basic", "plan_premium"}));
  EXPECT_EQ(transform_outputs(m.featurizers[1]), std::vector<std::string>{"income_scaled"});
}

TEST(LoadModel, MalformedDocuments) {
  EXPECT_EQ(error_of([] { load_model("{not json"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([] { load_model(R"({"raw_inputs": []})"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([] { load_model(R"({"name": "x", "raw_inputs": [], "core": {"kind": "svm"}})"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(error_of([] {
              load_model(R"({"name": "x", "raw_inputs": [{"name": "a", "type": "DECIMAL"}],
                "core": {"kind": "linear", "weights": {"a": 1}}})");
            }),
            ErrorCode::kParseError);
  EXPECT_EQ(error_of([] {
              load_model(R"({"name": "x", "raw_inputs": [{"name": "a", "type": "FLOAT64"}],
                "core": {"kind": "linear", "weights": {"a": "heavy"}}})");
            }),
            ErrorCode::kParseError);
  const std::string msg = message_of([] {
    load_model(R"({"name": "x", "raw_inputs": [{"name": "a", "type": "FLOAT64"}],
      "core": {"kind": "tree_ensemble", "trees": [{"feature": "a", "threshold": 1, "left": {"leaf": 0}}]}})");
  });
  EXPECT_NE(msg.find("core.trees[0].right"), std::string::npos) << msg;
}

TEST(LoadModel, InvariantViolations) {
  EXPECT_EQ(error_of([] {
              load_model(R"({"name": "x", "raw_inputs": [{"name": "a", "type": "FLOAT64"}],
                "featurizers": [{"kind": "scale", "input": "a", "mean": 0, "stddev": -1}],
                "core": {"kind": "linear", "weights": {"a_scaled": 1}}})");
            }),
            ErrorCode::kValidationError);
  EXPECT_EQ(error_of([] {
              load_model(R"({"name": "x", "raw_inputs": [{"name": "c", "type": "STRING"}],
                "featurizers": [{"kind": "one_hot", "input": "c", "categories": ["a", "a"]}],
                "core": {"kind": "linear", "weights": {"c_a": 1}}})");
            }),
            ErrorCode::kValidationError);
}

TEST(SaveModel, RoundTripCorpus) {
  testing::Rng rng(101);
  const Schema schema = testing::random_schema({});
  for (int i = 0; i < 100; ++i) {
    const auto m = testing::random_model(rng, schema, {});
    const std::string text = save_model(m);
    const auto back = load_model(text);
    ASSERT_TRUE(model_equal(back, m)) << text;
    EXPECT_EQ(save_model(back), text);
  }
}

TEST(SaveModel, PreservesAwkwardDoubles) {
  ModelPipeline m;
  m.name = "d";
  m.raw_inputs = {{"x", DataType::kFloat64}};
  TreeEnsemble e;
  e.inputs = {"x"};
  e.trees = {TreeNode::split("x", 0.1 + 0.2, TreeNode::leaf(1e-300), TreeNode::leaf(-0.0))};
  m.core = e;
  EXPECT_TRUE(model_equal(load_model(save_model(m)), m));
}

}  // namespace
}  // namespace inferq
