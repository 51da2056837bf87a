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

#ifndef INFERQ_EXECUTOR_H_
#define INFERQ_EXECUTOR_H_

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "inferq/plan.h"
#include "inferq/table.h"

namespace inferq {

inline constexpr size_t kDefaultBatchSize = 4096;

struct ExecOptions {
  size_t batch_size = kDefaultBatchSize;
};

// Pull-based iterator over a plan's output batches. Never yields an empty
// batch; nullopt marks the end.
class PlanCursor {
 public:
  PlanCursor(const Plan& plan, const std::map<std::string, Table>& tables,
             const ExecOptions& options = {});
  ~PlanCursor();
  PlanCursor(PlanCursor&&) noexcept;
  PlanCursor& operator=(PlanCursor&&) noexcept;

  const Schema& schema() const;
  std::optional<Batch> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs `plan` to completion. Predicts without a strategy run as VECTOR.
// Errors carry the failing node's label.
Table execute(const Plan& plan, const std::map<std::string, Table>& tables,
              const ExecOptions& options = {});

}  // namespace inferq

#endif  // INFERQ_EXECUTOR_H_
