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

#include "inferq/model_source.h"

#include <algorithm>

#include "inferq/error.h"
#include "inferq/model_io.h"

namespace inferq {

ModelLookup ModelSource::as_lookup() const {
  return [this](const ModelRef& ref) {
    return resolve(ref.name, ref.version > 0 ? std::optional<int64_t>(ref.version) : std::nullopt).model;
  };
}

void StaticModelSource::add(std::shared_ptr<const ModelPipeline> model, int64_t version) {
  const std::string name = model->name;
  models_[name] = ResolvedModel{ModelRef{name, version, ""}, std::move(model)};
}

ResolvedModel StaticModelSource::resolve(const std::string& name, std::optional<int64_t> version) const {
  auto it = models_.find(name);
  if (it == models_.end()) throw Error(ErrorCode::kUnknownModel, "unknown model '" + name + "'");
  if (version && *version != it->second.ref.version) {
    throw Error(ErrorCode::kUnknownVersion,
                "model '" + name + "' has no version " + std::to_string(*version));
  }
  return it->second;
}

std::unique_ptr<StaticModelSource> load_model_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  auto source = std::make_unique<StaticModelSource>();
  for (const auto& f : files) {
    source->add(std::make_shared<const ModelPipeline>(load_model_file(f)));
  }
  return source;
}

}  // namespace inferq
