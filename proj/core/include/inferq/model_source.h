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

#ifndef INFERQ_MODEL_SOURCE_H_
#define INFERQ_MODEL_SOURCE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "inferq/model.h"
#include "inferq/plan.h"

namespace inferq {

struct ResolvedModel {
  ModelRef ref;  // carries the concrete version
  std::shared_ptr<const ModelPipeline> model;
};

// Resolves model names for the frontend. A missing version means the
// latest one.
class ModelSource {
 public:
  virtual ~ModelSource() = default;
  // Throws UnknownModel / UnknownVersion.
  virtual ResolvedModel resolve(const std::string& name, std::optional<int64_t> version) const = 0;

  ModelLookup as_lookup() const;
};

// In-memory models, each held at a single version.
class StaticModelSource : public ModelSource {
 public:
  void add(std::shared_ptr<const ModelPipeline> model, int64_t version = 1);
  ResolvedModel resolve(const std::string& name, std::optional<int64_t> version) const override;

 private:
  std::map<std::string, ResolvedModel> models_;
};

// Every `*.json` model document in `dir`, registered as version 1 under the
// model's own name.
std::unique_ptr<StaticModelSource> load_model_dir(const std::filesystem::path& dir);

}  // namespace inferq

#endif  // INFERQ_MODEL_SOURCE_H_
