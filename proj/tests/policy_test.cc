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

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <gtest/gtest.h>

#include "inferq/error.h"
#include "inferq/policy.h"
#include "support/generators.h"
#include "support/temp_dir.h"

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

Table scores(std::vector<double> score, std::vector<int64_t> n = {}) {
  if (n.empty()) n.assign(score.size(), 1);
  return Table(Schema({{"score", DataType::kFloat64}, {"n", DataType::kInt64}}), {std::move(score), std::move(n)});
}

const char* kCap = R"({"rules": [
  {"name": "cap", "priority": 1, "condition": "score > 0.9",
   "action": {"kind": "clamp", "lo": 0, "hi": 0.9}}]})";

TEST(ParsePolicies, OrdersByPriorityStably) {
  const auto set = parse_policies(R"({"rules": [
    {"name": "late", "priority": 10, "condition": "TRUE", "action": {"kind": "reject"}},
    {"name": "early", "priority": 5, "condition": "TRUE", "action": {"kind": "override", "value": 1}},
    {"name": "early2", "priority": 5, "condition": "TRUE", "action": {"kind": "reject"}}]})");
  ASSERT_EQ(set.rules.size(), 3u);
  EXPECT_EQ(set.rules[0].name, "early");
  EXPECT_EQ(set.rules[1].name, "early2");
  EXPECT_EQ(set.rules[2].name, "late");
  EXPECT_EQ(set.prediction_column, "score");
}

TEST(ParsePolicies, Errors) {
  EXPECT_EQ(error_of([] {
              parse_policies(R"({"rules": [{"name": "c", "priority": 1, "condition": "score > 1",
                                 "action": {"kind": "clamp", "lo": 5, "hi": 1}}]})");
            }),
            ErrorCode::kValidationError);
  EXPECT_EQ(error_of([] { parse_policies("{"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([] {
              parse_policies(R"({"rules": [{"name": "c", "priority": 1, "condition": "score + 1",
                                 "action": {"kind": "reject"}}]})");
            }),
            ErrorCode::kValidationError);
  EXPECT_EQ(error_of([] {
              parse_policies(R"({"rules": [{"name": "c", "priority": 1, "condition": "score >",
                                 "action": {"kind": "reject"}}]})");
            }),
            ErrorCode::kValidationError);
  EXPECT_EQ(error_of([] {
              parse_policies(R"({"rules": [{"name": "c", "priority": 1, "condition": "TRUE",
                                 "action": {"kind": "explode"}}]})");
            }),
            ErrorCode::kValidationError);
}

TEST(ParsePolicies, EmptyRuleListIsIdentity) {
  const auto set = parse_policies(R"({"rules": []})");
  EXPECT_TRUE(set.rules.empty());
  MemoryAuditSink sink;
  const Table in = scores({0.1, 0.95});
  const Table out = apply_policies(set, in, sink);
  EXPECT_EQ(std::get<std::vector<double>>(out.column(kFinalColumn)), (std::vector<double>{0.1, 0.95}));
  EXPECT_EQ(std::get<std::vector<std::string>>(out.column(kOutcomeColumn)),
            (std::vector<std::string>{"PASS", "PASS"}));
  EXPECT_TRUE(sink.records().empty());
}

TEST(ApplyPolicies, ClampAndPass) {
  MemoryAuditSink sink;
  const Table out = apply_policies(parse_policies(kCap), scores({0.95, 0.5}), sink);
  EXPECT_EQ(std::get<std::vector<double>>(out.column(kFinalColumn)), (std::vector<double>{0.9, 0.5}));
  EXPECT_EQ(std::get<std::vector<std::string>>(out.column(kOutcomeColumn)),
            (std::vector<std::string>{"CLAMP", "PASS"}));
  EXPECT_EQ(std::get<std::vector<std::string>>(out.column(kRuleColumn)), (std::vector<std::string>{"cap", ""}));
  const auto records = sink.records();
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].seq, 1u);
  EXPECT_EQ(records[0].row_id, 0u);
  EXPECT_EQ(records[0].rule, "cap");
  EXPECT_EQ(records[0].raw, 0.95);
  EXPECT_EQ(records[0].final_value, 0.9);
  EXPECT_EQ(records[0].outcome, Outcome::kClamp);
}

TEST(ApplyPolicies, FirstMatchWins) {
  const auto set = parse_policies(R"({"rules": [
    {"name": "reject_low", "priority": 1, "condition": "score < 0.1", "action": {"kind": "reject"}},
    {"name": "floor", "priority": 2, "condition": "score < 0.5", "action": {"kind": "override", "value": 0.5}}]})");
  MemoryAuditSink sink;
  const Table out = apply_policies(set, scores({0.05, 0.3, 0.7}), sink);
  EXPECT_EQ(std::get<std::vector<std::string>>(out.column(kOutcomeColumn)),
            (std::vector<std::string>{"REJECT", "OVERRIDE", "PASS"}));
  EXPECT_EQ(std::get<std::vector<double>>(out.column(kFinalColumn)), (std::vector<double>{0.05, 0.5, 0.7}));
  const auto records = sink.records();
  ASSERT_EQ(records.size(), 2u);
  const std::string line = format_audit_record(records[0]);
  EXPECT_EQ(line.rfind("1,", 0), 0u) << line;
  EXPECT_TRUE(line.ends_with(",0,reject_low,0.05,REJECTED,REJECT")) << line;
  EXPECT_EQ(records[1].seq, 2u);
}

TEST(ApplyPolicies, MissingColumnCommitsNothing) {
  const auto set = parse_policies(R"({"rules": [
    {"name": "ok", "priority": 1, "condition": "score > 0.5", "action": {"kind": "reject"}},
    {"name": "bad", "priority": 2, "condition": "region = 'eu'", "action": {"kind": "reject"}}]})");
  MemoryAuditSink sink;
  EXPECT_EQ(error_of([&] { apply_policies(set, scores({0.9, 0.1}), sink); }), ErrorCode::kMissingColumn);
  EXPECT_TRUE(sink.records().empty());
  PolicySet other;
  other.prediction_column = "p";
  EXPECT_EQ(error_of([&] { apply_policies(other, scores({0.9}), sink); }), ErrorCode::kMissingColumn);
}

TEST(ApplyPolicies, FailureMidBatchCommitsNothing) {
  // Row 7 divides by zero after earlier rows already matched.
  const auto set = parse_policies(R"({"rules": [
    {"name": "div", "priority": 1, "condition": "10 / n > 0", "action": {"kind": "override", "value": 1}}]})");
  std::vector<double> s(10, 0.5);
  std::vector<int64_t> n(10, 1);
  n[7] = 0;
  MemoryAuditSink sink;
  EXPECT_EQ(error_of([&] { apply_policies(set, scores(s, n), sink); }), ErrorCode::kDivisionByZero);
  EXPECT_TRUE(sink.records().empty());
}

TEST(ApplyPolicies, AuditCompletenessAndExclusivityFuzz) {
  testing::Rng rng(127);
  const auto set = parse_policies(R"({"rules": [
    {"name": "hi", "priority": 3, "condition": "score > 0.8", "action": {"kind": "clamp", "lo": 0, "hi": 0.8}},
    {"name": "neg", "priority": 1, "condition": "n < 0", "action": {"kind": "reject"}},
    {"name": "mid", "priority": 2, "condition": "score > 0.4 AND score < 0.45",
     "action": {"kind": "override", "value": 0}}]})");
  MemoryAuditSink sink;
  size_t expected_records = 0;
  for (int batch = 0; batch < 20; ++batch) {
    std::vector<double> s;
    std::vector<int64_t> n;
    for (int i = 0; i < 500; ++i) {
      s.push_back(rng.uniform(0, 1));
      n.push_back(rng.integer(-1, 8));
    }
    const Table out = apply_policies(set, scores(s, n), sink);
    ASSERT_EQ(out.num_rows(), s.size());
    const auto& outcome = std::get<std::vector<std::string>>(out.column(kOutcomeColumn));
    const auto& final_value = std::get<std::vector<double>>(out.column(kFinalColumn));
    for (size_t i = 0; i < s.size(); ++i) {
      // Oracle: the first matching rule in priority order.
      std::string want = "PASS";
      if (n[i] < 0) {
        want = "REJECT";
      } else if (s[i] > 0.4 && s[i] < 0.45) {
        want = "OVERRIDE";
      } else if (s[i] > 0.8) {
        want = "CLAMP";
      }
      ASSERT_EQ(outcome[i], want);
      if (want == "PASS") {
        EXPECT_EQ(final_value[i], s[i]);
      } else {
        ++expected_records;
      }
      if (want == "CLAMP") {
        EXPECT_EQ(final_value[i], 0.8);
      }
    }
  }
  const auto records = sink.records();
  ASSERT_EQ(records.size(), expected_records);
  for (size_t i = 0; i < records.size(); ++i) EXPECT_EQ(records[i].seq, i + 1);
}

TEST(FileAuditSink, AppendsAndContinuesNumbering) {
  testing::TempDir dir("policy");
  const auto path = dir / "audit.log";
  const auto set = parse_policies(kCap);
  {
    FileAuditSink sink(path);
    apply_policies(set, scores({0.95, 0.99}), sink);
  }
  {
    FileAuditSink sink(path);
    apply_policies(set, scores({0.1, 0.91}), sink);
  }
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  for (size_t i = 0; i < lines.size(); ++i) {
    EXPECT_EQ(lines[i].substr(0, lines[i].find(',')), std::to_string(i + 1));
  }
  EXPECT_NE(lines[2].find(",1,cap,0.91,0.9,CLAMP"), std::string::npos) << lines[2];
}

TEST(FileAuditSink, FailedBatchLeavesFileUntouched) {
  testing::TempDir dir("policy");
  const auto path = dir / "audit.log";
  FileAuditSink sink(path);
  apply_policies(parse_policies(kCap), scores({0.95}), sink);
  const auto bad = parse_policies(R"({"rules": [
    {"name": "div", "priority": 1, "condition": "1 / n > 0", "action": {"kind": "reject"}}]})");
  EXPECT_THROW(apply_policies(bad, scores({0.5, 0.5}, {1, 0}), sink), Error);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

}  // namespace
}  // namespace inferq
