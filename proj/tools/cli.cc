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

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "bench.h"
#include "inferq/catalog.h"
#include "inferq/csv.h"
#include "inferq/error.h"
#include "inferq/executor.h"
#include "inferq/model_io.h"
#include "inferq/optimizer.h"
#include "inferq/policy.h"
#include "inferq/query.h"
#include "inferq/stats.h"

namespace inferq::cli {

namespace {

namespace fs = std::filesystem;

struct QueryArgs {
  std::string query;
  std::string data;
  std::string models;
  std::string stats;
  bool no_opt = false;
  std::vector<std::string> disable;
  size_t batch_size = kDefaultBatchSize;
};

void add_query_options(CLI::App* cmd, QueryArgs& a) {
  cmd->add_option("--query", a.query, "Query file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--data", a.data, "Directory of <table>.csv files")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--models", a.models, "Catalog directory or directory of model files")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--stats", a.stats, "Directory of <table>.stats files")->check(CLI::ExistingDirectory);
  cmd->add_flag("--no-opt", a.no_opt, "Execute the unoptimized plan");
  cmd->add_option("--disable", a.disable, "Disable an optimizer rule")
      ->check(CLI::IsMember(bench::rule_names()));
  cmd->add_option("--batch-size", a.batch_size, "Rows per execution batch")->check(CLI::PositiveNumber);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::unique_ptr<ModelSource> open_models(const fs::path& dir) {
  if (Catalog::exists(dir)) return std::make_unique<Catalog>(dir);
  return load_model_dir(dir);
}

struct Prepared {
  std::map<std::string, Table> tables;
  std::unique_ptr<ModelSource> models;
  OptimizeResult optimized;
};

Prepared prepare(const QueryArgs& a) {
  Prepared p;
  const QueryAst ast = parse_query(read_text(a.query));
  p.tables = load_data_dir(a.data);
  p.models = open_models(a.models);
  std::map<std::string, Schema> schemas;
  for (const auto& [name, t] : p.tables) schemas.emplace(name, t.schema());
  const Plan plan = lower(ast, *p.models, schemas);
  if (a.no_opt) {
    p.optimized.plan = plan;
    return p;
  }
  StatsMap stats;
  if (!a.stats.empty()) stats = load_stats_dir(a.stats);
  p.optimized = optimize(plan, stats, bench::config_without(a.disable));
  return p;
}

int cmd_run(const QueryArgs& a, const std::string& out_path, const std::string& policies,
            const std::string& audit, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  Prepared p = prepare(a);
  Table result = execute(p.optimized.plan, p.tables, ExecOptions{a.batch_size});
  if (!policies.empty()) {
    const PolicySet set = load_policies(policies);
    FileAuditSink sink(audit.empty() ? out_path + ".audit" : audit);
    result = apply_policies(set, result, sink);
  }
  write_csv_file(result, out_path);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out << "rows: " << result.num_rows() << "\n";
  out << "time_ms: " << format_double(ms) << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& data, const std::string& out_dir, const std::string& only,
                std::ostream& out) {
  const auto tables = load_data_dir(data);
  if (!only.empty() && !tables.count(only)) {
    throw Error(ErrorCode::kUnknownTable, "no table '" + only + "' in " + data);
  }
  fs::create_directories(out_dir);
  for (const auto& [name, t] : tables) {
    if (!only.empty() && name != only) continue;
    const TableStats s = analyze(t, name);
    save_stats_file(s, fs::path(out_dir) / (name + ".stats"));
    out << name << ": " << s.row_count << " rows, " << s.columns.size() << " columns\n";
  }
  return kExitOk;
}

int cmd_bench(const std::string& suite, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto cases = bench::load_suite(suite);
  std::ofstream csv(out_path);
  if (!csv) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
  bench::write_header(csv);
  bool failed = false;
  for (const auto& c : cases) {
    try {
      for (const auto& row : bench::run_case(c, &out)) bench::write_row(csv, row);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEquivalenceFailure) throw;
      err << "error: " << e.what() << "\n";
      failed = true;
    }
  }
  return failed ? kExitError : kExitOk;
}

std::pair<std::string, std::optional<int64_t>> parse_model_arg(const std::string& arg) {
  const auto at = arg.find('@');
  if (at == std::string::npos) return {arg, std::nullopt};
  try {
    size_t used = 0;
    const int64_t v = std::stoll(arg.substr(at + 1), &used);
    if (used == arg.size() - at - 1 && v > 0) return {arg.substr(0, at), v};
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("model", "expected NAME or NAME@VERSION, got '" + arg + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prediction queries with cross-optimized model inference", "inferq"};
  app.require_subcommand(1);

  QueryArgs run_args;
  std::string run_out, run_policies, run_audit;
  CLI::App* run_cmd = app.add_subcommand("run", "Optimize and execute a query");
  add_query_options(run_cmd, run_args);
  run_cmd->add_option("--policies", run_policies, "Policy file applied to the result")->check(CLI::ExistingFile);
  run_cmd->add_option("--audit", run_audit, "Audit log file (default: <out>.audit)");
  run_cmd->add_option("--out", run_out, "Output CSV")->required();

  QueryArgs explain_args;
  CLI::App* explain_cmd = app.add_subcommand("explain", "Print the optimized plan and applied rewrites");
  add_query_options(explain_cmd, explain_args);

  std::string analyze_data, analyze_out, analyze_table;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Collect table statistics");
  analyze_cmd->add_option("--data", analyze_data, "Directory of <table>.csv files")
      ->required()
      ->check(CLI::ExistingDirectory);
  analyze_cmd->add_option("--out", analyze_out, "Directory for <table>.stats files")->required();
  analyze_cmd->add_option("--table", analyze_table, "Analyze only this table");

  std::string bench_suite, bench_out;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Compare optimizer flag sets on a benchmark suite");
  bench_cmd->add_option("suite", bench_suite, "Suite file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench_out, "Results CSV")->required();

  std::string catalog_dir = "catalog";
  CLI::App* catalog_cmd = app.add_subcommand("catalog", "Manage the model catalog");
  catalog_cmd->add_option("--catalog", catalog_dir, "Catalog directory");
  catalog_cmd->require_subcommand(1);
  std::string reg_name, reg_file;
  CLI::App* reg_cmd = catalog_cmd->add_subcommand("register", "Register a new model version");
  reg_cmd->add_option("name", reg_name, "Model name")->required();
  reg_cmd->add_option("file", reg_file, "Model file")->required()->check(CLI::ExistingFile);
  std::string get_arg, get_out;
  CLI::App* get_cmd = catalog_cmd->add_subcommand("get", "Print or save a model version");
  get_cmd->add_option("model", get_arg, "NAME or NAME@VERSION")->required();
  get_cmd->add_option("--out", get_out, "Write the model here instead of stdout");
  std::string hist_name;
  CLI::App* hist_cmd = catalog_cmd->add_subcommand("history", "List the versions of a model");
  hist_cmd->add_option("name", hist_name, "Model name")->required();
  std::string manifest;
  CLI::App* tx_cmd = catalog_cmd->add_subcommand("transact", "Register several models atomically");
  tx_cmd->add_option("manifest", manifest, "Manifest file")->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    CLI::App* failing = &app;
    for (CLI::App* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_args, run_out, run_policies, run_audit, out);
    if (explain_cmd->parsed()) {
      Prepared p = prepare(explain_args);
      out << explain(p.optimized);
      return kExitOk;
    }
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_data, analyze_out, analyze_table, out);
    if (bench_cmd->parsed()) return cmd_bench(bench_suite, bench_out, out, err);
    if (catalog_cmd->parsed()) {
      if (get_cmd->parsed()) {
        const auto [name, version] = parse_model_arg(get_arg);
        Catalog catalog(catalog_dir);
        const std::string doc = save_model(catalog.get(name, version));
        if (get_out.empty()) {
          out << doc;
        } else {
          std::ofstream f(get_out);
          if (!(f << doc)) throw Error(ErrorCode::kIoError, "cannot write " + get_out);
        }
        return kExitOk;
      }
      if (hist_cmd->parsed()) {
        Catalog catalog(catalog_dir);
        for (const auto& e : catalog.history(hist_name)) {
          out << e.name << "@" << e.version << " " << e.digest << " tx=" << e.txid << " ts=" << e.created_at_ms
              << "\n";
        }
        return kExitOk;
      }
      Catalog catalog(catalog_dir);
      if (reg_cmd->parsed()) {
        const int64_t v = catalog.register_model(reg_name, load_model_file(reg_file));
        out << reg_name << "@" << v << "\n";
        return kExitOk;
      }
      if (tx_cmd->parsed()) {
        const auto updates = load_manifest(manifest);
        const auto versions = catalog.transact(updates);
        for (size_t i = 0; i < updates.size(); ++i) out << updates[i].first << "@" << versions[i] << "\n";
        return kExitOk;
      }
    }
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace inferq::cli
