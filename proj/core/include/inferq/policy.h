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

#ifndef INFERQ_POLICY_H_
#define INFERQ_POLICY_H_

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "inferq/expr.h"
#include "inferq/table.h"

namespace inferq {

struct Override {
  double value = 0.0;
};
struct Clamp {
  double lo = 0.0;
  double hi = 0.0;
};
struct Reject {};

using PolicyAction = std::variant<Override, Clamp, Reject>;

struct PolicyRule {
  std::string name;
  int64_t priority = 0;
  Expr condition;
  PolicyAction action;
};

inline constexpr const char* kDefaultPredictionColumn = "score";

// Rules in evaluation order.
struct PolicySet {
  std::string prediction_column = kDefaultPredictionColumn;
  std::vector<PolicyRule> rules;
};

enum class Outcome { kPass, kOverride, kClamp, kReject };
std::string_view outcome_name(Outcome o);

struct AuditRecord {
  uint64_t seq = 0;  // assigned by the sink at commit
  int64_t timestamp_ms = 0;
  uint64_t row_id = 0;
  std::string rule;
  double raw = 0.0;
  double final_value = 0.0;
  Outcome outcome = Outcome::kPass;
};

// `seq,timestamp,row_id,rule,raw,final,outcome`; rejected rows print
// REJECTED as their final value.
std::string format_audit_record(const AuditRecord& r);

class AuditSink {
 public:
  virtual ~AuditSink() = default;
  // Appends every record or none, numbering them consecutively.
  virtual void commit(std::vector<AuditRecord>& records) = 0;
};

class MemoryAuditSink : public AuditSink {
 public:
  void commit(std::vector<AuditRecord>& records) override;
  std::vector<AuditRecord> records() const;

 private:
  mutable std::mutex mu_;
  std::vector<AuditRecord> records_;
};

// Append-only audit file; numbering continues from the file's last record.
class FileAuditSink : public AuditSink {
 public:
  explicit FileAuditSink(std::filesystem::path path);
  void commit(std::vector<AuditRecord>& records) override;

 private:
  std::filesystem::path path_;
  std::mutex mu_;
  uint64_t next_seq_ = 1;
};

// Parses a policy document and orders rules by priority, keeping
// declaration order among equal priorities. Throws ParseError and
// ValidationError.
PolicySet parse_policies(std::string_view document);
PolicySet load_policies(const std::filesystem::path& path);

// Columns the decisions table appends to the predictions table.
inline constexpr const char* kFinalColumn = "final";
inline constexpr const char* kOutcomeColumn = "outcome";
inline constexpr const char* kRuleColumn = "rule";

// Applies the first matching rule to each row. All-or-nothing: on any
// error no audit record is committed and nothing is returned.
Table apply_policies(const PolicySet& policies, const Table& predictions, AuditSink& sink);

}  // namespace inferq

#endif  // INFERQ_POLICY_H_
