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

#include "inferq/model.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <unordered_map>

#include "inferq/error.h"

namespace inferq {

TreePtr TreeNode::leaf(double value) {
  auto n = std::make_shared<TreeNode>();
  n->value = value;
  return n;
}

TreePtr TreeNode::split(std::string feature, double threshold, TreePtr left, TreePtr right) {
  auto n = std::make_shared<TreeNode>();
  n->feature = std::move(feature);
  n->threshold = threshold;
  n->left = std::move(left);
  n->right = std::move(right);
  return n;
}

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

bool tree_equal(const TreeNode& a, const TreeNode& b) {
  if (&a == &b) return true;
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return same_bits(a.value, b.value);
  return a.feature == b.feature && same_bits(a.threshold, b.threshold) &&
         tree_equal(*a.left, *b.left) && tree_equal(*a.right, *b.right);
}

size_t tree_node_count(const TreeNode& t) {
  if (t.is_leaf()) return 1;
  return 1 + tree_node_count(*t.left) + tree_node_count(*t.right);
}

size_t tree_depth(const TreeNode& t) {
  if (t.is_leaf()) return 1;
  return 1 + std::max(tree_depth(*t.left), tree_depth(*t.right));
}

const std::string& transform_input(const Transform& t) {
  return std::visit([](const auto& x) -> const std::string& { return x.input; }, t);
}

std::vector<std::string> transform_outputs(const Transform& t) {
  if (const auto* oh = std::get_if<OneHot>(&t)) return oh->outputs;
  return {std::get<Scale>(t).output};
}

DataType transform_input_type(const Transform& t) {
  return std::holds_alternative<OneHot>(t) ? DataType::kString : DataType::kFloat64;
}

std::string describe(const Transform& t) {
  std::string out;
  if (const auto* oh = std::get_if<OneHot>(&t)) {
    out = "one_hot(" + oh->input + ") -> (";
  } else {
    const auto& s = std::get<Scale>(t);
    out = "scale(" + s.input + ", mean=" + format_double(s.mean) +
          ", stddev=" + format_double(s.stddev) + ") -> (";
  }
  const auto outs = transform_outputs(t);
  for (size_t i = 0; i < outs.size(); ++i) {
    if (i > 0) out += ',';
    out += outs[i];
  }
  return out + ")";
}

bool transform_equal(const Transform& a, const Transform& b) {
  if (a.index() != b.index()) return false;
  if (const auto* oa = std::get_if<OneHot>(&a)) {
    const auto& ob = std::get<OneHot>(b);
    return oa->input == ob.input && oa->categories == ob.categories && oa->outputs == ob.outputs;
  }
  const auto& sa = std::get<Scale>(a);
  const auto& sb = std::get<Scale>(b);
  return sa.input == sb.input && same_bits(sa.mean, sb.mean) &&
         same_bits(sa.stddev, sb.stddev) && sa.output == sb.output;
}

const std::vector<std::string>& ModelPipeline::core_inputs() const {
  return std::visit([](const auto& c) -> const std::vector<std::string>& { return c.inputs; },
                    core);
}

bool model_equal(const ModelPipeline& a, const ModelPipeline& b) {
  if (a.name != b.name || a.raw_inputs != b.raw_inputs ||
      a.featurizers.size() != b.featurizers.size() || a.core.index() != b.core.index()) {
    return false;
  }
  for (size_t i = 0; i < a.featurizers.size(); ++i) {
    if (!transform_equal(a.featurizers[i], b.featurizers[i])) return false;
  }
  if (const auto* la = std::get_if<LinearModel>(&a.core)) {
    const auto& lb = std::get<LinearModel>(b.core);
    if (la->inputs != lb.inputs || la->link != lb.link || !same_bits(la->intercept, lb.intercept) ||
        la->weights.size() != lb.weights.size()) {
      return false;
    }
    for (size_t i = 0; i < la->weights.size(); ++i) {
      if (!same_bits(la->weights[i], lb.weights[i])) return false;
    }
    return true;
  }
  const auto& ea = std::get<TreeEnsemble>(a.core);
  const auto& eb = std::get<TreeEnsemble>(b.core);
  if (ea.inputs != eb.inputs || ea.aggregate != eb.aggregate || ea.link != eb.link ||
      ea.trees.size() != eb.trees.size()) {
    return false;
  }
  for (size_t i = 0; i < ea.trees.size(); ++i) {
    if (!tree_equal(*ea.trees[i], *eb.trees[i])) return false;
  }
  return true;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kValidationError, field + ": " + what);
}

void check_finite(double v, const std::string& field) {
  if (!std::isfinite(v)) invalid(field, "must be finite");
}

void validate_tree(const TreeNode* t, const std::set<std::string>& inputs,
                   const std::string& field) {
  if (t == nullptr) invalid(field, "missing node");
  if (t->is_leaf()) {
    if (t->right != nullptr) invalid(field, "leaf with a child");
    check_finite(t->value, field + ".leaf");
    return;
  }
  if (!inputs.count(t->feature)) {
    invalid(field + ".feature", "split on undeclared feature '" + t->feature + "'");
  }
  check_finite(t->threshold, field + ".threshold");
  validate_tree(t->left.get(), inputs, field + ".left");
  validate_tree(t->right.get(), inputs, field + ".right");
}

}  // namespace

void validate_model(const ModelPipeline& m) {
  if (m.name.empty()) invalid("name", "must not be empty");
  std::unordered_map<std::string, DataType> available;
  for (size_t i = 0; i < m.raw_inputs.size(); ++i) {
    const auto& in = m.raw_inputs[i];
    const std::string field = "raw_inputs[" + std::to_string(i) + "]";
    if (in.name.empty()) invalid(field + ".name", "must not be empty");
    if (in.type != DataType::kFloat64 && in.type != DataType::kString) {
      invalid(field + ".type", "raw inputs must be FLOAT64 or STRING");
    }
    if (!available.emplace(in.name, in.type).second) {
      invalid(field + ".name", "duplicate input '" + in.name + "'");
    }
  }
  for (size_t i = 0; i < m.featurizers.size(); ++i) {
    const auto& t = m.featurizers[i];
    const std::string field = "featurizers[" + std::to_string(i) + "]";
    auto it = available.find(transform_input(t));
    if (it == available.end()) {
      invalid(field + ".input", "unknown input '" + transform_input(t) + "'");
    }
    if (it->second != transform_input_type(t)) {
      invalid(field + ".input", "expects a " + std::string(type_name(transform_input_type(t))) +
                                    " input, '" + it->first + "' is " +
                                    std::string(type_name(it->second)));
    }
    if (const auto* oh = std::get_if<OneHot>(&t)) {
      if (oh->categories.empty()) invalid(field + ".categories", "must not be empty");
      std::set<std::string> uniq(oh->categories.begin(), oh->categories.end());
      if (uniq.size() != oh->categories.size()) invalid(field + ".categories", "must be unique");
      if (oh->outputs.size() != oh->categories.size()) {
        invalid(field + ".outputs", "one output per category required");
      }
    } else {
      const auto& s = std::get<Scale>(t);
      check_finite(s.mean, field + ".mean");
      check_finite(s.stddev, field + ".stddev");
      if (!(s.stddev > 0.0)) invalid(field + ".stddev", "must be strictly positive");
    }
    for (const auto& out : transform_outputs(t)) {
      if (out.empty()) invalid(field + ".outputs", "empty output name");
      if (!available.emplace(out, DataType::kFloat64).second) {
        invalid(field + ".outputs", "name '" + out + "' already defined");
      }
    }
  }
  const auto& inputs = m.core_inputs();
  std::set<std::string> declared;
  for (const auto& name : inputs) {
    auto it = available.find(name);
    if (it == available.end()) invalid("core.inputs", "'" + name + "' is not produced by the pipeline");
    if (it->second != DataType::kFloat64) invalid("core.inputs", "'" + name + "' is not FLOAT64");
    if (!declared.insert(name).second) invalid("core.inputs", "duplicate input '" + name + "'");
  }
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    if (lin->weights.size() != lin->inputs.size()) {
      invalid("core.weights", "expected " + std::to_string(lin->inputs.size()) + " weights, got " +
                                  std::to_string(lin->weights.size()));
    }
    for (size_t i = 0; i < lin->weights.size(); ++i) {
      check_finite(lin->weights[i], "core.weights." + lin->inputs[i]);
    }
    check_finite(lin->intercept, "core.intercept");
    return;
  }
  const auto& ens = std::get<TreeEnsemble>(m.core);
  if (ens.trees.empty()) invalid("core.trees", "must not be empty");
  for (size_t i = 0; i < ens.trees.size(); ++i) {
    validate_tree(ens.trees[i].get(), declared, "core.trees[" + std::to_string(i) + "]");
  }
}

namespace {

double eval_tree(const TreeNode& t, const std::unordered_map<std::string, double>& env) {
  const TreeNode* n = &t;
  while (!n->is_leaf()) {
    n = env.at(n->feature) < n->threshold ? n->left.get() : n->right.get();
  }
  return n->value;
}

double apply_link(Link link, double x) { return link == Link::kSigmoid ? sigmoid(x) : x; }

}  // namespace

double eval_model(const ModelPipeline& m, const RowBinding& row) {
  std::unordered_map<std::string, double> num;
  std::unordered_map<std::string, std::string> str;
  for (const auto& in : m.raw_inputs) {
    auto it = row.find(in.name);
    if (it == row.end()) {
      throw Error(ErrorCode::kMissingFeature, "model '" + m.name + "' needs input '" + in.name + "'");
    }
    if (type_of(it->second) != in.type) {
      throw Error(ErrorCode::kTypeMismatch, "input '" + in.name + "' must be " +
                                                std::string(type_name(in.type)));
    }
    if (in.type == DataType::kFloat64) {
      num[in.name] = std::get<double>(it->second);
    } else {
      str[in.name] = std::get<std::string>(it->second);
    }
  }
  for (const auto& t : m.featurizers) {
    if (const auto* oh = std::get_if<OneHot>(&t)) {
      const std::string& s = str.at(oh->input);
      for (size_t i = 0; i < oh->categories.size(); ++i) {
        num[oh->outputs[i]] = s == oh->categories[i] ? 1.0 : 0.0;
      }
    } else {
      const auto& sc = std::get<Scale>(t);
      num[sc.output] = (num.at(sc.input) - sc.mean) / sc.stddev;
    }
  }
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    double acc = lin->intercept;
    for (size_t i = 0; i < lin->inputs.size(); ++i) {
      if (lin->weights[i] == 0.0) continue;
      acc = acc + lin->weights[i] * num.at(lin->inputs[i]);
    }
    return apply_link(lin->link, acc);
  }
  const auto& ens = std::get<TreeEnsemble>(m.core);
  double acc = eval_tree(*ens.trees[0], num);
  for (size_t i = 1; i < ens.trees.size(); ++i) acc = acc + eval_tree(*ens.trees[i], num);
  if (ens.aggregate == Aggregate::kAvg) acc = acc / static_cast<double>(ens.trees.size());
  return apply_link(ens.link, acc);
}

namespace {

void collect_split_features(const TreeNode& t, std::set<std::string>& out) {
  if (t.is_leaf()) return;
  out.insert(t.feature);
  collect_split_features(*t.left, out);
  collect_split_features(*t.right, out);
}

// Names the core actually reads.
std::set<std::string> used_core_inputs(const ModelPipeline& m) {
  std::set<std::string> used;
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    for (size_t i = 0; i < lin->inputs.size(); ++i) {
      if (lin->weights[i] != 0.0) used.insert(lin->inputs[i]);
    }
  } else {
    for (const auto& t : std::get<TreeEnsemble>(m.core).trees) collect_split_features(*t, used);
  }
  return used;
}

// Walks featurizers backwards, expanding needed outputs into their inputs.
// Returns the needed names and marks which featurizers must be kept.
std::set<std::string> close_over_featurizers(const ModelPipeline& m, std::set<std::string> needed,
                                             std::vector<bool>* keep) {
  if (keep) keep->assign(m.featurizers.size(), false);
  for (size_t i = m.featurizers.size(); i-- > 0;) {
    const auto& t = m.featurizers[i];
    bool any = false;
    for (const auto& out : transform_outputs(t)) any = any || needed.count(out) > 0;
    if (!any) continue;
    if (keep) (*keep)[i] = true;
    needed.insert(transform_input(t));
  }
  return needed;
}

}  // namespace

std::set<std::string> used_features(const ModelPipeline& m) {
  const auto needed = close_over_featurizers(m, used_core_inputs(m), nullptr);
  std::set<std::string> out;
  for (const auto& in : m.raw_inputs) {
    if (needed.count(in.name)) out.insert(in.name);
  }
  return out;
}

namespace {

using IntervalEnv = std::map<std::string, Interval>;

TreePtr prune_tree(const TreePtr& t, IntervalEnv& env) {
  if (t->is_leaf()) return t;
  auto it = env.find(t->feature);
  if (it == env.end()) {
    TreePtr l = prune_tree(t->left, env);
    TreePtr r = prune_tree(t->right, env);
    if (l == t->left && r == t->right) return t;
    return TreeNode::split(t->feature, t->threshold, std::move(l), std::move(r));
  }
  const Interval iv = it->second;
  if (iv.below(t->threshold)) return prune_tree(t->left, env);
  if (iv.at_or_above(t->threshold)) return prune_tree(t->right, env);
  // The threshold lies strictly inside the interval, so both halves are non-empty.
  it->second = Interval(iv.lo(), iv.lo_closed(), t->threshold, false);
  TreePtr l = prune_tree(t->left, env);
  env.find(t->feature)->second = Interval(t->threshold, true, iv.hi(), iv.hi_closed());
  TreePtr r = prune_tree(t->right, env);
  env.find(t->feature)->second = iv;
  if (l == t->left && r == t->right) return t;
  return TreeNode::split(t->feature, t->threshold, std::move(l), std::move(r));
}

}  // namespace

ModelPipeline prune_with_domain(const ModelPipeline& m, const DomainConstraints& d) {
  ModelPipeline out = m;
  auto* ens = std::get_if<TreeEnsemble>(&out.core);
  if (ens == nullptr || d.empty()) return out;
  IntervalEnv env;
  const std::set<std::string> core(ens->inputs.begin(), ens->inputs.end());
  for (const auto& in : m.raw_inputs) {
    if (in.type != DataType::kFloat64 || !core.count(in.name)) continue;
    if (auto iv = d.interval_for(in.name)) env.emplace(in.name, *iv);
  }
  if (env.empty()) return out;
  for (auto& t : ens->trees) t = prune_tree(t, env);
  return out;
}

ModelPipeline drop_unused_inputs(const ModelPipeline& m) {
  const auto core_used = used_core_inputs(m);
  std::vector<bool> keep;
  const auto needed = close_over_featurizers(m, core_used, &keep);
  ModelPipeline out;
  out.name = m.name;
  for (const auto& in : m.raw_inputs) {
    if (needed.count(in.name)) out.raw_inputs.push_back(in);
  }
  for (size_t i = 0; i < m.featurizers.size(); ++i) {
    if (keep[i]) out.featurizers.push_back(m.featurizers[i]);
  }
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    LinearModel l;
    l.intercept = lin->intercept;
    l.link = lin->link;
    for (size_t i = 0; i < lin->inputs.size(); ++i) {
      if (lin->weights[i] == 0.0) continue;
      l.inputs.push_back(lin->inputs[i]);
      l.weights.push_back(lin->weights[i]);
    }
    out.core = std::move(l);
  } else {
    TreeEnsemble e = std::get<TreeEnsemble>(m.core);
    std::vector<std::string> inputs;
    for (const auto& name : e.inputs) {
      if (core_used.count(name)) inputs.push_back(name);
    }
    e.inputs = std::move(inputs);
    out.core = std::move(e);
  }
  return out;
}

namespace {

Expr inline_tree(const TreeNode& t, const std::map<std::string, Expr>& env) {
  if (t.is_leaf()) return ex::lit(t.value);
  Expr cond = ex::cmp(CmpOp::kLt, env.at(t.feature), ex::lit(t.threshold));
  return ex::case_({CaseBranch{cond, inline_tree(*t.left, env)}}, inline_tree(*t.right, env));
}

Expr apply_link(Link link, Expr e) {
  return link == Link::kSigmoid ? ex::sigmoid(std::move(e)) : e;
}

}  // namespace

Expr inline_to_expr(const ModelPipeline& m, const std::map<std::string, Expr>& bindings) {
  std::map<std::string, Expr> env;
  const auto needed = close_over_featurizers(m, used_core_inputs(m), nullptr);
  for (const auto& in : m.raw_inputs) {
    if (!needed.count(in.name)) continue;
    auto it = bindings.find(in.name);
    if (it == bindings.end()) {
      throw Error(ErrorCode::kMissingFeature, "no binding for model input '" + in.name + "'");
    }
    env.emplace(in.name, it->second);
  }
  for (const auto& t : m.featurizers) {
    if (!env.count(transform_input(t))) continue;
    const Expr& x = env.at(transform_input(t));
    if (const auto* oh = std::get_if<OneHot>(&t)) {
      for (size_t i = 0; i < oh->categories.size(); ++i) {
        Expr cond = ex::cmp(CmpOp::kEq, x, ex::lit(oh->categories[i]));
        env.insert_or_assign(oh->outputs[i],
                             ex::case_({CaseBranch{cond, ex::lit(1.0)}}, ex::lit(0.0)));
      }
    } else {
      const auto& sc = std::get<Scale>(t);
      env.insert_or_assign(
          sc.output, ex::arith(ArithOp::kDiv, ex::arith(ArithOp::kSub, x, ex::lit(sc.mean)),
                               ex::lit(sc.stddev)));
    }
  }
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    Expr acc = ex::lit(lin->intercept);
    for (size_t i = 0; i < lin->inputs.size(); ++i) {
      if (lin->weights[i] == 0.0) continue;
      acc = ex::arith(ArithOp::kAdd, acc,
                      ex::arith(ArithOp::kMul, ex::lit(lin->weights[i]), env.at(lin->inputs[i])));
    }
    return apply_link(lin->link, std::move(acc));
  }
  const auto& ens = std::get<TreeEnsemble>(m.core);
  Expr acc = inline_tree(*ens.trees[0], env);
  for (size_t i = 1; i < ens.trees.size(); ++i) {
    acc = ex::arith(ArithOp::kAdd, acc, inline_tree(*ens.trees[i], env));
  }
  if (ens.aggregate == Aggregate::kAvg) {
    acc = ex::arith(ArithOp::kDiv, acc, ex::lit(static_cast<double>(ens.trees.size())));
  }
  return apply_link(ens.link, std::move(acc));
}

size_t node_count(const ModelPipeline& m) {
  const auto* ens = std::get_if<TreeEnsemble>(&m.core);
  if (ens == nullptr) return 0;
  size_t n = 0;
  for (const auto& t : ens->trees) n += tree_node_count(*t);
  return n;
}

size_t depth(const ModelPipeline& m) {
  const auto* ens = std::get_if<TreeEnsemble>(&m.core);
  if (ens == nullptr) return 0;
  size_t d = 0;
  for (const auto& t : ens->trees) d = std::max(d, tree_depth(*t));
  return d;
}

size_t op_count(const ModelPipeline& m) {
  size_t ops = 0;
  if (const auto* lin = std::get_if<LinearModel>(&m.core)) {
    ops = 1;
    for (double w : lin->weights) ops += w != 0.0 ? 1 : 0;
  } else {
    ops = node_count(m);
  }
  for (const auto& t : m.featurizers) {
    ops += std::holds_alternative<OneHot>(t) ? std::get<OneHot>(t).categories.size() : 2;
  }
  return ops;
}

}  // namespace inferq
