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

#include "inferq/model_io.h"

#include <fstream>
#include <sstream>

#include "inferq/error.h"
#include "json.hpp"

namespace inferq {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kParseError, field + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& field) {
  if (!obj.is_object()) bad(field, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(field + "." + key, "missing");
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& field) {
  const json& v = member(obj, key, field);
  if (!v.is_string()) bad(field + "." + key, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) bad(field, "expected a number");
  return v.get<double>();
}

double get_number(const json& obj, const char* key, const std::string& field) {
  return get_number(member(obj, key, field), field + "." + key);
}

Link parse_link(const json& obj, const std::string& field) {
  auto it = obj.find("link");
  if (it == obj.end()) return Link::kIdentity;
  if (*it == "identity") return Link::kIdentity;
  if (*it == "sigmoid") return Link::kSigmoid;
  bad(field + ".link", "expected \"identity\" or \"sigmoid\"");
}

std::vector<std::string> string_list(const json& v, const std::string& field) {
  if (!v.is_array()) bad(field, "expected a list");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) bad(field, "expected strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

TreePtr parse_tree(const json& v, const std::string& field, int depth) {
  if (depth > 512) bad(field, "tree too deep");
  if (!v.is_object()) bad(field, "expected a node object");
  if (v.contains("leaf")) return TreeNode::leaf(get_number(v, "leaf", field));
  return TreeNode::split(get_string(v, "feature", field), get_number(v, "threshold", field),
                         parse_tree(member(v, "left", field), field + ".left", depth + 1),
                         parse_tree(member(v, "right", field), field + ".right", depth + 1));
}

json dump_tree(const TreeNode& t) {
  if (t.is_leaf()) return json{{"leaf", t.value}};
  return json{{"feature", t.feature},
              {"threshold", t.threshold},
              {"left", dump_tree(*t.left)},
              {"right", dump_tree(*t.right)}};
}

}  // namespace

ModelPipeline load_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  ModelPipeline m;
  m.name = get_string(doc, "name", "model");

  const json& raw = member(doc, "raw_inputs", "model");
  if (!raw.is_array()) bad("raw_inputs", "expected a list");
  for (size_t i = 0; i < raw.size(); ++i) {
    const std::string field = "raw_inputs[" + std::to_string(i) + "]";
    const std::string tname = get_string(raw[i], "type", field);
    auto type = parse_type_name(tname);
    if (!type) bad(field + ".type", "unknown type '" + tname + "'");
    m.raw_inputs.push_back({get_string(raw[i], "name", field), *type});
  }

  if (doc.contains("featurizers")) {
    const json& feats = doc["featurizers"];
    if (!feats.is_array()) bad("featurizers", "expected a list");
    for (size_t i = 0; i < feats.size(); ++i) {
      const std::string field = "featurizers[" + std::to_string(i) + "]";
      const json& f = feats[i];
      const std::string kind = get_string(f, "kind", field);
      if (kind == "one_hot") {
        OneHot oh;
        oh.input = get_string(f, "input", field);
        oh.categories = string_list(member(f, "categories", field), field + ".categories");
        if (f.contains("outputs")) {
          oh.outputs = string_list(f["outputs"], field + ".outputs");
        } else {
          for (const auto& c : oh.categories) oh.outputs.push_back(oh.input + "_" + c);
        }
        m.featurizers.emplace_back(std::move(oh));
      } else if (kind == "scale") {
        Scale s;
        s.input = get_string(f, "input", field);
        s.mean = get_number(f, "mean", field);
        s.stddev = get_number(f, "stddev", field);
        s.output = f.contains("output") ? get_string(f, "output", field) : s.input + "_scaled";
        m.featurizers.emplace_back(std::move(s));
      } else {
        bad(field + ".kind", "unknown featurizer kind '" + kind + "'");
      }
    }
  }

  const json& core = member(doc, "core", "model");
  const std::string kind = get_string(core, "kind", "core");
  if (kind == "linear") {
    LinearModel lin;
    const json& weights = member(core, "weights", "core");
    if (!weights.is_object()) bad("core.weights", "expected a name -> number map");
    for (const auto& [name, w] : weights.items()) {
      lin.inputs.push_back(name);
      lin.weights.push_back(get_number(w, "core.weights." + name));
    }
    lin.intercept = core.contains("intercept") ? get_number(core, "intercept", "core") : 0.0;
    lin.link = parse_link(core, "core");
    m.core = std::move(lin);
  } else if (kind == "tree_ensemble") {
    TreeEnsemble ens;
    const std::string agg = core.contains("aggregate") ? get_string(core, "aggregate", "core") : "sum";
    if (agg == "sum") {
      ens.aggregate = Aggregate::kSum;
    } else if (agg == "avg") {
      ens.aggregate = Aggregate::kAvg;
    } else {
      bad("core.aggregate", "expected \"sum\" or \"avg\"");
    }
    ens.link = parse_link(core, "core");
    const json& trees = member(core, "trees", "core");
    if (!trees.is_array()) bad("core.trees", "expected a list");
    for (size_t i = 0; i < trees.size(); ++i) {
      ens.trees.push_back(parse_tree(trees[i], "core.trees[" + std::to_string(i) + "]", 0));
    }
    if (core.contains("inputs")) {
      ens.inputs = string_list(core["inputs"], "core.inputs");
    } else {
      // Default: every FLOAT64 name the pipeline produces.
      for (const auto& in : m.raw_inputs) {
        if (in.type == DataType::kFloat64) ens.inputs.push_back(in.name);
      }
      for (const auto& t : m.featurizers) {
        for (const auto& out : transform_outputs(t)) ens.inputs.push_back(out);
      }
    }
    m.core = std::move(ens);
  } else {
    bad("core.kind", "unknown core kind '" + kind + "'");
  }
  validate_model(m);
  return m;
}

ModelPipeline load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

std::string save_model(const ModelPipeline& m) {
  json doc;
  doc["name"] = m.name;
  doc["raw_inputs"] = json::array();
  for (const auto& in : m.raw_inputs) {
    doc["raw_inputs"].push_back({{"name", in.name}, {"type", std::string(type_name(in.type))}});
  }
  doc["featurizers"] = json::array();
  for (const auto& t : m.featurizers) {
    if (const auto* oh = std::get_if<OneHot>(&t)) {
      doc["featurizers"].push_back({{"kind", "one_hot"},
                                    {"input", oh->input},
                                    {"categories", oh->categories},
                                    {"outputs", oh->outputs}});
    } else {
      const auto& s = std::get<Scale>(t);
      doc["featurizers"].push_back({{"kind", "scale"},
                                    {"input", s.input},
                                    {"mean", s.mean},
                                    {"stddev", s.stddev},
                                    {"output", s.output}});
    }
  }
  json core;
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    core["kind"] = "linear";
    json weights = json::object();
    for (size_t i = 0; i < lin->inputs.size(); ++i) weights[lin->inputs[i]] = lin->weights[i];
    core["weights"] = std::move(weights);
    core["intercept"] = lin->intercept;
    core["link"] = lin->link == Link::kSigmoid ? "sigmoid" : "identity";
  } else {
    const auto& ens = std::get<TreeEnsemble>(m.core);
    core["kind"] = "tree_ensemble";
    core["aggregate"] = ens.aggregate == Aggregate::kAvg ? "avg" : "sum";
    core["link"] = ens.link == Link::kSigmoid ? "sigmoid" : "identity";
    core["inputs"] = ens.inputs;
    core["trees"] = json::array();
    for (const auto& t : ens.trees) core["trees"].push_back(dump_tree(*t));
  }
  doc["core"] = std::move(core);
  return doc.dump(2) + "\n";
}

}  // namespace inferq
