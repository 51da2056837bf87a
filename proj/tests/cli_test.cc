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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "support/temp_dir.h"

namespace inferq {
namespace {

namespace fs = std::filesystem;

const std::string kChurn = INFERQ_TEST_DATA_DIR "/churn";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::string> query_args(const std::string& cmd) {
  return {cmd, "--query", kChurn + "/query.sql", "--data", kChurn + "/data", "--models", kChurn + "/models"};
}

TEST(CliTest, RunMatchesGoldenOutput) {
  testing::TempDir tmp("cli");
  auto args = query_args("run");
  args.insert(args.end(), {"--out", (tmp / "out.csv").string()});
  const Result r = run(args);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(slurp(tmp / "out.csv"), slurp(kChurn + "/expected.csv"));
  EXPECT_EQ(r.out.rfind("rows: 4\ntime_ms: ", 0), 0u) << r.out;
}

TEST(CliTest, UnoptimizedRunGivesSameBytes) {
  testing::TempDir tmp("cli");
  auto args = query_args("run");
  args.insert(args.end(), {"--no-opt", "--batch-size", "3", "--out", (tmp / "out.csv").string()});
  ASSERT_EQ(run(args).code, cli::kExitOk);
  EXPECT_EQ(slurp(tmp / "out.csv"), slurp(kChurn + "/expected.csv"));
}

TEST(CliTest, MissingRequiredOptionIsUsageError) {
  const Result r = run({"run", "--data", kChurn + "/data", "--models", kChurn + "/models", "--out", "x.csv"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("--query"), std::string::npos) << r.err;
}

TEST(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(run({}).code, cli::kExitUsage); }

TEST(CliTest, UnknownRuleIsUsageError) {
  auto args = query_args("explain");
  args.insert(args.end(), {"--disable", "magic"});
  EXPECT_EQ(run(args).code, cli::kExitUsage);
}

TEST(CliTest, ExplainListsRewrites) {
  const Result r = run(query_args("explain"));
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("-- rewrites:"), std::string::npos);
  EXPECT_NE(r.out.find("predicate_model_pruning: churn"), std::string::npos) << r.out;

  auto args = query_args("explain");
  args.insert(args.end(), {"--disable", "pruning"});
  const Result off = run(args);
  ASSERT_EQ(off.code, cli::kExitOk) << off.err;
  EXPECT_EQ(off.out.find("predicate_model_pruning"), std::string::npos) << off.out;
}

TEST(CliTest, ParseErrorReportsPosition) {
  testing::TempDir tmp("cli");
  write(tmp / "bad.sql", "SELECT id\nFROM customers WHERE age >");
  const Result r = run({"explain", "--query", (tmp / "bad.sql").string(), "--data", kChurn + "/data", "--models",
                        kChurn + "/models"});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("line 2, column"), std::string::npos) << r.err;
}

TEST(CliTest, RunWithPoliciesWritesAudit) {
  testing::TempDir tmp("cli");
  write(tmp / "p.json", R"({"rules": [{"name": "cap", "priority": 1, "condition": "score > 0.7",
                                        "action": {"kind": "clamp", "lo": 0.0, "hi": 0.7}}]})");
  auto args = query_args("run");
  args.insert(args.end(), {"--policies", (tmp / "p.json").string(), "--out", (tmp / "out.csv").string()});
  const Result r = run(args);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const std::string csv = slurp(tmp / "out.csv");
  EXPECT_EQ(csv.rfind("id,score,final,outcome,rule\n", 0), 0u) << csv;
  EXPECT_NE(csv.find("8,0.759510916949111,0.7,CLAMP,cap\n"), std::string::npos) << csv;
  const std::string audit = slurp(tmp / "out.csv.audit");
  EXPECT_NE(audit.find(",cap,0.759510916949111,0.7,CLAMP"), std::string::npos) << audit;
}

TEST(CliTest, AnalyzeWritesStats) {
  testing::TempDir tmp("cli");
  const Result r = run({"analyze", "--data", kChurn + "/data", "--out", (tmp / "stats").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("customers: ", 0), 0u) << r.out;
  EXPECT_TRUE(fs::exists(tmp / "stats" / "customers.stats"));

  auto args = query_args("explain");
  args.insert(args.end(), {"--stats", (tmp / "stats").string()});
  EXPECT_EQ(run(args).code, cli::kExitOk);

  EXPECT_EQ(run({"analyze", "--data", kChurn + "/data", "--out", (tmp / "s2").string(), "--table", "nope"}).code,
            cli::kExitError);
}

TEST(CliTest, BenchNeedsTwoFlagSets) {
  testing::TempDir tmp("cli");
  write(tmp / "suite.json", R"({"cases": [{"name": "one", "synthetic": {"workload": "churn", "rows": 100},
                                           "flag_sets": [{"name": "base", "rules": []}]}]})");
  const Result r = run({"bench", (tmp / "suite.json").string(), "--out", (tmp / "r.csv").string()});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.err.find("two flag sets"), std::string::npos) << r.err;
}

TEST(CliTest, BenchWritesResults) {
  testing::TempDir tmp("cli");
  write(tmp / "suite.json", R"({"cases": [{"name": "small", "repetitions": 1,
      "synthetic": {"workload": "churn", "rows": 200, "features": 5, "trees": 4},
      "flag_sets": [{"name": "none", "rules": []}, {"name": "all", "rules": ["all"]}]}]})");
  const Result r = run({"bench", (tmp / "suite.json").string(), "--out", (tmp / "r.csv").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const std::string csv = slurp(tmp / "r.csv");
  EXPECT_EQ(csv.rfind("case,flags,rows,median_ms,speedup_vs_baseline\nsmall,none,", 0), 0u) << csv;
  EXPECT_NE(csv.find("\nsmall,all,"), std::string::npos) << csv;
}

TEST(CliTest, CatalogCommands) {
  testing::TempDir tmp("cli");
  const std::string cat = (tmp / "cat").string();
  const std::string model = kChurn + "/models/churn.json";

  Result r = run({"catalog", "--catalog", cat, "register", "churn", model});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out, "churn@1\n");

  write(tmp / "m.json", R"({"updates": [{"name": "churn", "file": ")" + model +
                            R"("}, {"name": "other", "file": ")" + model + R"("}]})");
  r = run({"catalog", "--catalog", cat, "transact", (tmp / "m.json").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out, "churn@2\nother@1\n");

  r = run({"catalog", "--catalog", cat, "history", "churn"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("churn@1 ", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("\nchurn@2 "), std::string::npos) << r.out;

  r = run({"catalog", "--catalog", cat, "get", "churn@1"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out, run({"catalog", "--catalog", cat, "get", "churn"}).out);

  EXPECT_EQ(run({"catalog", "--catalog", cat, "get", "churn@9"}).code, cli::kExitError);
  EXPECT_EQ(run({"catalog", "--catalog", cat, "get", "churn@x"}).code, cli::kExitUsage);

  auto args = query_args("run");
  args[6] = cat;
  args.insert(args.end(), {"--out", (tmp / "out.csv").string()});
  ASSERT_EQ(run(args).code, cli::kExitOk);
  EXPECT_EQ(slurp(tmp / "out.csv"), slurp(kChurn + "/expected.csv"));
}

}  // namespace
}  // namespace inferq
