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

#include "inferq/stats.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "inferq/error.h"
#include "json.hpp"

namespace inferq {

const ColumnStats* TableStats::find(const std::string& column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

size_t bucket_of(double v, double min, double max) {
  if (!(max > min)) return 0;
  const double pos = (v - min) / (max - min) * static_cast<double>(kHistogramBuckets);
  if (pos <= 0.0) return 0;
  return std::min(static_cast<size_t>(pos), kHistogramBuckets - 1);
}

namespace {

template <class T>
void fill_numeric(const std::vector<T>& data, ColumnStats& s) {
  if (data.empty()) return;
  auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  s.min = static_cast<double>(*lo);
  s.max = static_cast<double>(*hi);
  for (const T& x : data) ++s.histogram[bucket_of(static_cast<double>(x), s.min, s.max)];
}

template <class T, class ToValue>
void fill_distinct(const std::vector<T>& data, ColumnStats& s, ToValue to_value) {
  std::set<T> seen;
  for (const T& x : data) {
    seen.insert(x);
    if (seen.size() > kDistinctCutoff) break;
  }
  s.distinct_count = seen.size();
  s.distinct_exact = seen.size() <= kDistinctCutoff;
  if (s.distinct_exact) {
    for (const T& x : seen) s.values.push_back(to_value(x));
  }
}

}  // namespace

TableStats analyze(const Table& table, const std::string& name) {
  TableStats out;
  out.table = name;
  out.row_count = table.num_rows();
  for (size_t c = 0; c < table.num_columns(); ++c) {
    ColumnStats s;
    s.name = table.schema()[c].name;
    s.type = table.schema()[c].type;
    const Column& col = table.column(c);
    switch (s.type) {
      case DataType::kInt64:
        fill_numeric(std::get<0>(col), s);
        fill_distinct(std::get<0>(col), s, [](int64_t x) { return Value(x); });
        break;
      case DataType::kFloat64:
        fill_numeric(std::get<1>(col), s);
        fill_distinct(std::get<1>(col), s, [](double x) { return Value(x); });
        break;
      case DataType::kBool:
        fill_numeric(std::get<2>(col), s);
        fill_distinct(std::get<2>(col), s, [](uint8_t x) { return Value(x != 0); });
        break;
      case DataType::kString:
        fill_distinct(std::get<3>(col), s, [](const std::string& x) { return Value(x); });
        break;
    }
    out.columns.push_back(std::move(s));
  }
  return out;
}

namespace {

// Fraction of rows below v, interpolating linearly inside the bucket holding v.
double cdf(const ColumnStats& s, double v, uint64_t rows) {
  if (v <= s.min) return 0.0;
  if (v >= s.max) return 1.0;
  const double width = (s.max - s.min) / static_cast<double>(kHistogramBuckets);
  const size_t k = bucket_of(v, s.min, s.max);
  double mass = 0.0;
  for (size_t b = 0; b < k; ++b) mass += static_cast<double>(s.histogram[b]);
  const double lo = s.min + width * static_cast<double>(k);
  const double frac = std::clamp((v - lo) / width, 0.0, 1.0);
  mass += static_cast<double>(s.histogram[k]) * frac;
  return std::clamp(mass / static_cast<double>(rows), 0.0, 1.0);
}

double equality(const ColumnStats& s, const Value& v) {
  if (s.distinct_count == 0) return 0.0;
  if (is_numeric(s.type)) {
    if (!is_numeric(type_of(v))) return 1.0;
    const double d = as_double(v);
    if (d < s.min || d > s.max) return 0.0;
    if (s.distinct_exact) {
      const bool found = std::any_of(s.values.begin(), s.values.end(),
                                     [&](const Value& x) { return as_double(x) == d; });
      if (!found) return 0.0;
    }
    return 1.0 / static_cast<double>(s.distinct_count);
  }
  if (s.distinct_exact && std::find(s.values.begin(), s.values.end(), v) == s.values.end()) {
    return 0.0;
  }
  return 1.0 / static_cast<double>(s.distinct_count);
}

double compare_selectivity(const Compare& c, const TableStats& stats) {
  const auto* lcol = std::get_if<ColumnRef>(&c.lhs.node().v);
  const auto* rcol = std::get_if<ColumnRef>(&c.rhs.node().v);
  const auto* llit = std::get_if<Literal>(&c.lhs.node().v);
  const auto* rlit = std::get_if<Literal>(&c.rhs.node().v);
  const ColumnRef* column = nullptr;
  const Literal* literal = nullptr;
  CmpOp op = c.op;
  if (lcol && rlit) {
    column = lcol;
    literal = rlit;
  } else if (llit && rcol) {
    column = rcol;
    literal = llit;
    op = flip(op);
  } else {
    return 1.0;
  }
  const ColumnStats* s = stats.find(column->name);
  if (s == nullptr) return 1.0;
  if (op == CmpOp::kEq) return equality(*s, literal->value);
  if (op == CmpOp::kNe) return 1.0 - equality(*s, literal->value);
  if (!is_numeric(s->type) || !is_numeric(type_of(literal->value))) return 1.0;
  const double v = as_double(literal->value);
  double below;
  if (s->max == s->min) {
    const bool inclusive = op == CmpOp::kLe || op == CmpOp::kGt;
    below = (v > s->min || (inclusive && v == s->min)) ? 1.0 : 0.0;
  } else {
    below = cdf(*s, v, stats.row_count);
  }
  return (op == CmpOp::kLt || op == CmpOp::kLe) ? below : 1.0 - below;
}

double estimate(const Expr& e, const TableStats& stats) {
  const auto& v = e.node().v;
  if (const auto* lit = std::get_if<Literal>(&v)) {
    if (const auto* b = std::get_if<bool>(&lit->value)) return *b ? 1.0 : 0.0;
    return 1.0;
  }
  if (const auto* b = std::get_if<BoolOp>(&v)) {
    switch (b->op) {
      case BoolOpKind::kNot: return 1.0 - estimate(b->operands.at(0), stats);
      case BoolOpKind::kAnd: {
        double s = 1.0;
        for (const auto& o : b->operands) s *= estimate(o, stats);
        return s;
      }
      case BoolOpKind::kOr: {
        double s = 0.0;
        for (const auto& o : b->operands) {
          const double t = estimate(o, stats);
          s = s + t - s * t;
        }
        return s;
      }
    }
  }
  if (const auto* c = std::get_if<Compare>(&v)) return compare_selectivity(*c, stats);
  return 1.0;
}

}  // namespace

double selectivity(const Expr& predicate, const TableStats& stats) {
  if (stats.row_count == 0) return 1.0;
  return std::clamp(estimate(predicate, stats), 0.0, 1.0);
}

namespace {

using json = nlohmann::ordered_json;

json value_to_json(const Value& v) {
  switch (type_of(v)) {
    case DataType::kInt64: return std::get<int64_t>(v);
    case DataType::kFloat64: return std::get<double>(v);
    case DataType::kBool: return std::get<bool>(v);
    case DataType::kString: return std::get<std::string>(v);
  }
  return nullptr;
}

Value value_from_json(const json& j, DataType t) {
  switch (t) {
    case DataType::kInt64: return j.get<int64_t>();
    case DataType::kFloat64: return j.get<double>();
    case DataType::kBool: return j.get<bool>();
    case DataType::kString: return j.get<std::string>();
  }
  return {};
}

}  // namespace

std::string stats_to_json(const TableStats& stats) {
  json doc;
  doc["table"] = stats.table;
  doc["row_count"] = stats.row_count;
  doc["columns"] = json::array();
  for (const auto& c : stats.columns) {
    json col;
    col["name"] = c.name;
    col["type"] = std::string(type_name(c.type));
    if (c.type != DataType::kString) {
      col["min"] = c.min;
      col["max"] = c.max;
      col["histogram"] = c.histogram;
    }
    col["distinct_count"] = c.distinct_count;
    col["distinct_exact"] = c.distinct_exact;
    if (c.distinct_exact) {
      col["values"] = json::array();
      for (const auto& v : c.values) col["values"].push_back(value_to_json(v));
    }
    doc["columns"].push_back(std::move(col));
  }
  return doc.dump(2) + "\n";
}

TableStats stats_from_json(const std::string& text) {
  TableStats out;
  try {
    const json doc = json::parse(text);
    out.table = doc.at("table").get<std::string>();
    out.row_count = doc.at("row_count").get<uint64_t>();
    for (const auto& col : doc.at("columns")) {
      ColumnStats c;
      c.name = col.at("name").get<std::string>();
      auto t = parse_type_name(col.at("type").get<std::string>());
      if (!t) throw Error(ErrorCode::kParseError, "unknown column type in stats");
      c.type = *t;
      if (c.type != DataType::kString) {
        c.min = col.at("min").get<double>();
        c.max = col.at("max").get<double>();
        const auto& h = col.at("histogram");
        if (!h.is_array() || h.size() != kHistogramBuckets) {
          throw Error(ErrorCode::kParseError, "histogram must have 16 buckets");
        }
        for (size_t b = 0; b < kHistogramBuckets; ++b) c.histogram[b] = h[b].get<uint64_t>();
      }
      c.distinct_count = col.at("distinct_count").get<uint64_t>();
      c.distinct_exact = col.at("distinct_exact").get<bool>();
      if (c.distinct_exact) {
        for (const auto& v : col.at("values")) c.values.push_back(value_from_json(v, c.type));
      }
      out.columns.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("stats document: ") + e.what());
  }
  return out;
}

void save_stats_file(const TableStats& stats, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << stats_to_json(stats);
}

TableStats load_stats_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return stats_from_json(ss.str());
}

std::map<std::string, TableStats> load_stats_dir(const std::filesystem::path& dir) {
  std::map<std::string, TableStats> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".stats") continue;
    TableStats s = load_stats_file(entry.path());
    out.emplace(entry.path().stem().string(), std::move(s));
  }
  return out;
}

}  // namespace inferq
