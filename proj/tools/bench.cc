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

#include "bench.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "inferq/csv.h"
#include "inferq/error.h"
#include "inferq/executor.h"
#include "inferq/model_io.h"
#include "inferq/query.h"
#include "inferq/workload.h"

namespace inferq::bench {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kValidationError, msg); }

void set_rule(OptimizerConfig& c, const std::string& rule, bool on) {
  if (rule == "pruning") {
    c.pruning = on;
  } else if (rule == "projection_pushdown") {
    c.projection_pushdown = on;
  } else if (rule == "clustering") {
    c.clustering = on;
  } else if (rule == "inlining") {
    c.inlining = on;
  } else if (rule == "physical_selection") {
    c.physical_selection = on;
  } else if (rule == "all") {
    for (const auto& r : rule_names()) set_rule(c, r, on);
  } else {
    invalid("unknown rule '" + rule + "'");
  }
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t size_field(const json& j, const char* key, size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_unsigned()) invalid(std::string("'") + key + "' must be a non-negative integer");
  return j[key].get<size_t>();
}

BenchCase parse_case(const json& j, const std::filesystem::path& base) {
  BenchCase c;
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) invalid("each case needs a 'name'");
  c.name = j["name"].get<std::string>();
  auto source = std::make_shared<StaticModelSource>();
  if (j.contains("synthetic")) {
    const json& s = j["synthetic"];
    const std::string kind = s.value("workload", "");
    Workload w;
    if (kind == "churn") {
      ChurnOptions o;
      o.rows = size_field(s, "rows", o.rows);
      o.features = size_field(s, "features", o.features);
      o.trees = size_field(s, "trees", o.trees);
      o.seed = size_field(s, "seed", o.seed);
      w = churn_workload(o);
    } else if (kind == "regions") {
      RegionOptions o;
      o.rows = size_field(s, "rows", o.rows);
      o.trees = size_field(s, "trees", o.trees);
      o.seed = size_field(s, "seed", o.seed);
      w = region_workload(o);
    } else {
      invalid("case '" + c.name + "': unknown synthetic workload '" + kind + "'");
    }
    c.tables.emplace(w.table_name, w.table);
    source->add(w.model);
    c.query = w.query;
  } else {
    if (!j.contains("data") || !j["data"].is_string()) invalid("case '" + c.name + "' needs 'data' or 'synthetic'");
    c.tables = load_data_dir(base / j["data"].get<std::string>());
    if (j.contains("models")) {
      if (!j["models"].is_array()) invalid("case '" + c.name + "': 'models' must be a list of files");
      for (const auto& f : j["models"]) {
        source->add(std::make_shared<const ModelPipeline>(load_model_file(base / f.get<std::string>())));
      }
    }
  }
  if (j.contains("query")) {
    if (!j["query"].is_string()) invalid("case '" + c.name + "': 'query' must be a file name");
    c.query = read_text(base / j["query"].get<std::string>());
  }
  if (c.query.empty()) invalid("case '" + c.name + "' has no query");
  c.models = source;
  c.repetitions = static_cast<int>(size_field(j, "repetitions", 5));
  if (c.repetitions < 1) invalid("case '" + c.name + "': repetitions must be positive");
  if (!j.contains("flag_sets") || !j["flag_sets"].is_array()) invalid("case '" + c.name + "' needs 'flag_sets'");
  for (const auto& f : j["flag_sets"]) {
    if (!f.is_object() || !f.contains("name") || !f.contains("rules") || !f["rules"].is_array()) {
      invalid("case '" + c.name + "': each flag set needs 'name' and 'rules'");
    }
    c.flag_sets.push_back({f["name"].get<std::string>(), config_with(f["rules"].get<std::vector<std::string>>())});
  }
  if (c.flag_sets.size() < 2) {
    invalid("case '" + c.name + "' needs at least two flag sets (a baseline and a treatment)");
  }
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> kNames = {"pruning", "projection_pushdown", "clustering", "inlining",
                                                  "physical_selection"};
  return kNames;
}

OptimizerConfig config_with(const std::vector<std::string>& rules) {
  OptimizerConfig c = OptimizerConfig::none();
  for (const auto& r : rules) set_rule(c, r, true);
  return c;
}

OptimizerConfig config_without(const std::vector<std::string>& rules) {
  OptimizerConfig c;
  for (const auto& r : rules) set_rule(c, r, false);
  return c;
}

std::vector<BenchCase> load_suite(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("cases") || !doc["cases"].is_array()) {
    invalid(path.string() + ": expected an object with a 'cases' array");
  }
  std::vector<BenchCase> cases;
  for (const auto& j : doc["cases"]) cases.push_back(parse_case(j, path.parent_path()));
  return cases;
}

std::vector<BenchRow> run_case(const BenchCase& c, std::ostream* progress) {
  const QueryAst ast = parse_query(c.query);
  std::map<std::string, Schema> schemas;
  StatsMap stats;
  for (const auto& [name, t] : c.tables) {
    schemas.emplace(name, t.schema());
    stats.emplace(name, analyze(t, name));
  }
  const Plan plan = lower(ast, *c.models, schemas);
  auto run_once = [&](const OptimizerConfig& config) {
    return execute(optimize(plan, stats, config).plan, c.tables);
  };

  // Untimed warm-up doubles as the equivalence check.
  const Table baseline = run_once(c.flag_sets.front().config);
  for (size_t i = 1; i < c.flag_sets.size(); ++i) {
    const Table out = run_once(c.flag_sets[i].config);
    const std::string diff = compare_tables(baseline, out, 1e-12);
    if (!diff.empty()) {
      throw Error(ErrorCode::kEquivalenceFailure, "case '" + c.name + "', flags '" + c.flag_sets[i].name +
                                                       "' differ from baseline: " + diff);
    }
  }

  std::vector<BenchRow> rows;
  for (const auto& fs : c.flag_sets) {
    std::vector<double> times;
    for (int r = 0; r < c.repetitions; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const Table out = run_once(fs.config);
      const auto stop = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
    BenchRow row{c.name, fs.name, baseline.num_rows(), median(times), 0.0};
    row.speedup = rows.empty() ? 1.0 : rows.front().median_ms / row.median_ms;
    if (progress) *progress << c.name << " " << fs.name << ": " << row.median_ms << " ms\n";
    rows.push_back(row);
  }
  return rows;
}

void write_header(std::ostream& out) { out << "case,flags,rows,median_ms,speedup_vs_baseline\n"; }

void write_row(std::ostream& out, const BenchRow& row) {
  char ms[64], sp[64];
  std::snprintf(ms, sizeof(ms), "%.3f", row.median_ms);
  std::snprintf(sp, sizeof(sp), "%.3f", row.speedup);
  out << row.case_name << "," << row.flags << "," << row.rows << "," << ms << "," << sp << "\n";
}

}  // namespace inferq::bench
