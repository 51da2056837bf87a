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

#include "inferq/policy.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "inferq/error.h"
#include "inferq/kernels.h"
#include "inferq/query.h"

namespace inferq {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kValidationError, msg); }

double number_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) invalid(where + ": '" + key + "' must be a number");
  const double v = obj[key].get<double>();
  if (!std::isfinite(v)) invalid(where + ": '" + key + "' must be finite");
  return v;
}

// Conservative shape check for expressions that cannot be BOOL under any
// schema.
bool may_be_bool(const Expr& e) {
  const auto& v = e.node().v;
  if (std::holds_alternative<Arith>(v) || std::holds_alternative<Call>(v)) return false;
  if (const auto* lit = std::get_if<Literal>(&v)) return std::holds_alternative<bool>(lit->value);
  if (const auto* c = std::get_if<Case>(&v)) {
    for (const auto& b : c->branches) {
      if (!may_be_bool(b.result)) return false;
    }
    return may_be_bool(c->otherwise);
  }
  return true;
}

bool valid_rule_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kPass: return "PASS";
    case Outcome::kOverride: return "OVERRIDE";
    case Outcome::kClamp: return "CLAMP";
    case Outcome::kReject: return "REJECT";
  }
  return "";
}

std::string format_audit_record(const AuditRecord& r) {
  std::string out = std::to_string(r.seq) + "," + std::to_string(r.timestamp_ms) + "," +
                    std::to_string(r.row_id) + "," + r.rule + "," + format_double(r.raw) + ",";
  out += r.outcome == Outcome::kReject ? std::string("REJECTED") : format_double(r.final_value);
  out += ",";
  out += outcome_name(r.outcome);
  return out;
}

void MemoryAuditSink::commit(std::vector<AuditRecord>& records) {
  std::lock_guard<std::mutex> lock(mu_);
  uint64_t seq = records_.empty() ? 1 : records_.back().seq + 1;
  for (auto& r : records) r.seq = seq++;
  records_.insert(records_.end(), records.begin(), records.end());
}

std::vector<AuditRecord> MemoryAuditSink::records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

FileAuditSink::FileAuditSink(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  if (!last.empty()) {
    try {
      next_seq_ = std::stoull(last.substr(0, last.find(','))) + 1;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, "unreadable audit log " + path_.string());
    }
  }
}

void FileAuditSink::commit(std::vector<AuditRecord>& records) {
  if (records.empty()) return;
  std::lock_guard<std::mutex> lock(mu_);
  uint64_t seq = next_seq_;
  std::string text;
  for (auto& r : records) {
    r.seq = seq++;
    text += format_audit_record(r) + "\n";
  }
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::kIoError, "cannot open " + path_.string() + ": " + std::strerror(errno));
  const char* p = text.data();
  size_t left = text.size();
  while (left > 0) {
    const ssize_t w = ::write(fd, p, left);
    if (w < 0 && errno == EINTR) continue;
    if (w < 0) {
      const int err = errno;
      ::close(fd);
      throw Error(ErrorCode::kIoError, "cannot write " + path_.string() + ": " + std::strerror(err));
    }
    p += w;
    left -= static_cast<size_t>(w);
  }
  ::fsync(fd);
  ::close(fd);
  next_seq_ = seq;
}

PolicySet parse_policies(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("policy file: ") + e.what());
  }
  if (!doc.is_object()) invalid("policy file must be an object");
  PolicySet set;
  if (doc.contains("prediction_column")) {
    if (!doc["prediction_column"].is_string()) invalid("'prediction_column' must be a string");
    set.prediction_column = doc["prediction_column"].get<std::string>();
  }
  if (!doc.contains("rules") || !doc["rules"].is_array()) invalid("policy file needs a 'rules' array");
  for (const auto& r : doc["rules"]) {
    if (!r.is_object()) invalid("each rule must be an object");
    PolicyRule rule;
    if (!r.contains("name") || !r["name"].is_string()) invalid("rule needs a string 'name'");
    rule.name = r["name"].get<std::string>();
    const std::string where = "rule '" + rule.name + "'";
    if (!valid_rule_name(rule.name)) invalid(where + ": name may use letters, digits, '_', '-' and '.'");
    if (!r.contains("priority") || !r["priority"].is_number_integer()) invalid(where + ": 'priority' must be an integer");
    rule.priority = r["priority"].get<int64_t>();
    if (!r.contains("condition") || !r["condition"].is_string()) invalid(where + ": 'condition' must be a string");
    try {
      rule.condition = parse_expression(r["condition"].get<std::string>());
    } catch (const Error& e) {
      invalid(where + ": bad condition: " + e.what());
    }
    if (!may_be_bool(rule.condition)) invalid(where + ": condition is not BOOL-typed");
    if (!r.contains("action") || !r["action"].is_object() || !r["action"].contains("kind") ||
        !r["action"]["kind"].is_string()) {
      invalid(where + ": 'action' needs a 'kind'");
    }
    const json& a = r["action"];
    const std::string kind = a["kind"].get<std::string>();
    if (kind == "override") {
      rule.action = Override{number_field(a, "value", where)};
    } else if (kind == "clamp") {
      Clamp c{number_field(a, "lo", where), number_field(a, "hi", where)};
      if (c.lo > c.hi) invalid(where + ": clamp lo > hi");
      rule.action = c;
    } else if (kind == "reject") {
      rule.action = Reject{};
    } else {
      invalid(where + ": unknown action kind '" + kind + "'");
    }
    set.rules.push_back(std::move(rule));
  }
  std::stable_sort(set.rules.begin(), set.rules.end(),
                   [](const PolicyRule& a, const PolicyRule& b) { return a.priority < b.priority; });
  return set;
}

PolicySet load_policies(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_policies(ss.str());
}

Table apply_policies(const PolicySet& policies, const Table& predictions, AuditSink& sink) {
  const Schema& schema = predictions.schema();
  auto missing = [&](const std::string& col, const std::string& what) {
    return Error(ErrorCode::kMissingColumn, what + " references missing column '" + col + "'");
  };
  auto pred_idx = schema.index_of(policies.prediction_column);
  if (!pred_idx) throw missing(policies.prediction_column, "policy set");
  if (schema[*pred_idx].type != DataType::kFloat64) {
    throw Error(ErrorCode::kTypeMismatch, "prediction column '" + policies.prediction_column + "' is not FLOAT64");
  }
  std::vector<CompiledExpr> conditions;
  for (const auto& rule : policies.rules) {
    for (const auto& c : referenced_columns(rule.condition)) {
      if (!schema.contains(c)) throw missing(c, "rule '" + rule.name + "'");
    }
    if (type_check(rule.condition, schema) != DataType::kBool) {
      throw Error(ErrorCode::kValidationError, "rule '" + rule.name + "': condition is not BOOL-typed");
    }
    conditions.emplace_back(rule.condition, schema);
  }

  std::vector<Column> columns;
  for (size_t i = 0; i < predictions.num_columns(); ++i) columns.push_back(predictions.column(i));
  const Batch batch = make_batch(schema, columns);
  const auto& raw = std::get<std::vector<double>>(columns[*pred_idx]);
  const size_t n = predictions.num_rows();

  std::vector<double> final_values(n);
  std::vector<std::string> outcomes(n), fired(n);
  std::vector<AuditRecord> records;
  const int64_t ts = now_ms();
  for (size_t row = 0; row < n; ++row) {
    Outcome outcome = Outcome::kPass;
    double value = raw[row];
    for (size_t k = 0; k < conditions.size(); ++k) {
      if (!conditions[k].eval_bool(batch, row)) continue;
      const PolicyRule& rule = policies.rules[k];
      if (const auto* o = std::get_if<Override>(&rule.action)) {
        outcome = Outcome::kOverride;
        value = o->value;
      } else if (const auto* c = std::get_if<Clamp>(&rule.action)) {
        outcome = Outcome::kClamp;
        value = std::min(std::max(value, c->lo), c->hi);
      } else {
        outcome = Outcome::kReject;
      }
      fired[row] = rule.name;
      records.push_back(AuditRecord{0, ts, row, rule.name, raw[row], value, outcome});
      break;
    }
    final_values[row] = value;
    outcomes[row] = std::string(outcome_name(outcome));
  }

  std::vector<Field> fields = schema.fields();
  fields.push_back({kFinalColumn, DataType::kFloat64});
  fields.push_back({kOutcomeColumn, DataType::kString});
  fields.push_back({kRuleColumn, DataType::kString});
  Schema out_schema(std::move(fields));
  columns.push_back(std::move(final_values));
  columns.push_back(std::move(outcomes));
  columns.push_back(std::move(fired));
  Table out(std::move(out_schema), std::move(columns));
  sink.commit(records);
  return out;
}

}  // namespace inferq
