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

#ifndef INFERQ_CATALOG_H_
#define INFERQ_CATALOG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inferq/model.h"
#include "inferq/model_source.h"

namespace inferq {

struct CatalogEntry {
  std::string name;
  int64_t version = 0;
  std::string digest;
  int64_t created_at_ms = 0;
  uint64_t txid = 0;

  bool operator==(const CatalogEntry&) const = default;
};

// Latest committed version per model as of one commit.
struct Snapshot {
  uint64_t txid = 0;
  std::map<std::string, int64_t> versions;

  bool operator==(const Snapshot&) const = default;
};

// Points in a commit where a fault hook may abort the write.
enum class WriteStep {
  kObjectWritten,  // temp object file written, not yet synced
  kObjectSynced,   // temp object synced, not yet renamed
  kLogPartial,     // half of the log record written
  kLogWritten,     // full record written, not yet synced
  kLogSynced,      // durable, not yet visible in memory
};

using FaultHook = std::function<void(WriteStep)>;

class Catalog;

// Optimistic multi-model update. Conflicts are detected at commit time
// against the snapshot taken by Catalog::begin; the first committer wins.
class Transaction {
 public:
  // Throws ValidationError for an invalid model or repeated name.
  void put(const std::string& name, const ModelPipeline& model);
  // Returns the new versions in put order. Throws ConflictError.
  std::vector<int64_t> commit();

  const Snapshot& base() const { return base_; }

 private:
  friend class Catalog;
  Transaction(Catalog* catalog, Snapshot base) : catalog_(catalog), base_(std::move(base)) {}

  Catalog* catalog_;
  Snapshot base_;
  std::vector<std::pair<std::string, ModelPipeline>> updates_;
};

// Versioned model store at `root`: an append-only commit log plus
// content-addressed model documents. Readers never block; commits are
// serialized within and across processes.
class Catalog : public ModelSource {
 public:
  explicit Catalog(std::filesystem::path root, FaultHook hook = nullptr);
  ~Catalog() override;

  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;

  // True when `dir` holds a catalog log.
  static bool exists(const std::filesystem::path& dir);

  int64_t register_model(const std::string& name, const ModelPipeline& model);
  ModelPipeline get(const std::string& name, std::optional<int64_t> version = std::nullopt) const;
  // Commits `updates` atomically on top of the latest logged state.
  std::vector<int64_t> transact(const std::vector<std::pair<std::string, ModelPipeline>>& updates);
  std::vector<CatalogEntry> history(const std::string& name) const;
  Snapshot snapshot() const;
  Transaction begin() const;

  ResolvedModel resolve(const std::string& name, std::optional<int64_t> version) const override;

  const std::filesystem::path& root() const { return root_; }

 private:
  friend class Transaction;
  struct State;

  std::vector<int64_t> commit(const Snapshot& base,
                              const std::vector<std::pair<std::string, ModelPipeline>>& updates);
  // Folds log records appended since the last read (by any process).
  void catch_up();
  std::shared_ptr<const State> state() const;
  void write_object(const std::string& digest, const std::string& document);

  std::filesystem::path root_;
  FaultHook hook_;
  int lock_fd_ = -1;
  uint64_t log_offset_ = 0;
  mutable std::mutex commit_mu_;
  std::shared_ptr<const State> state_;
};

// Parses a transact manifest: `{"updates": [{"name": ..., "file": ...}]}`
// with files relative to the manifest.
std::vector<std::pair<std::string, ModelPipeline>> load_manifest(const std::filesystem::path& path);

}  // namespace inferq

#endif  // INFERQ_CATALOG_H_
