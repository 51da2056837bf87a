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

#ifndef INFERQ_MODEL_IO_H_
#define INFERQ_MODEL_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "inferq/model.h"

namespace inferq {

// Parses and validates a model document. Throws ParseError for malformed
// documents and ValidationError for invariant violations.
ModelPipeline load_model(std::string_view document);
ModelPipeline load_model_file(const std::filesystem::path& path);

// Canonical document text: identical models serialize to identical bytes.
std::string save_model(const ModelPipeline& m);

}  // namespace inferq

#endif  // INFERQ_MODEL_IO_H_
