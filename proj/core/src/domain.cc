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

#include "inferq/domain.h"

#include <algorithm>
#include <cmath>

#include "inferq/error.h"

namespace inferq {

Interval::Interval(double lo, bool lo_closed, double hi, bool hi_closed)
    : lo_(lo), hi_(hi), lo_closed_(lo_closed && std::isfinite(lo)),
      hi_closed_(hi_closed && std::isfinite(hi)) {
  if (std::isnan(lo) || std::isnan(hi)) {
    throw Error(ErrorCode::kValidationError, "interval bound is NaN");
  }
  if (lo_ > hi_ || (lo_ == hi_ && !(lo_closed_ && hi_closed_))) {
    throw Error(ErrorCode::kUnsatisfiablePredicate, "empty interval " + to_string());
  }
}

bool Interval::contains(double v) const {
  const bool above_lo = lo_closed_ ? v >= lo_ : v > lo_;
  const bool below_hi = hi_closed_ ? v <= hi_ : v < hi_;
  return above_lo && below_hi;
}

std::optional<Interval> Interval::intersect(const Interval& other) const {
  double lo = lo_;
  bool lo_c = lo_closed_;
  if (other.lo_ > lo) {
    lo = other.lo_;
    lo_c = other.lo_closed_;
  } else if (other.lo_ == lo) {
    lo_c = lo_c && other.lo_closed_;
  }
  double hi = hi_;
  bool hi_c = hi_closed_;
  if (other.hi_ < hi) {
    hi = other.hi_;
    hi_c = other.hi_closed_;
  } else if (other.hi_ == hi) {
    hi_c = hi_c && other.hi_closed_;
  }
  if (lo > hi || (lo == hi && !(lo_c && hi_c))) return std::nullopt;
  return Interval(lo, lo_c, hi, hi_c);
}

std::string Interval::to_string() const {
  std::string out = lo_closed_ ? "[" : "(";
  out += std::isinf(lo_) ? "-inf" : format_double(lo_);
  out += ", ";
  out += std::isinf(hi_) ? "+inf" : format_double(hi_);
  out += hi_closed_ ? "]" : ")";
  return out;
}

std::string to_string(const Constraint& c) {
  if (const auto* iv = std::get_if<Interval>(&c)) return iv->to_string();
  std::string out = "{";
  bool first = true;
  for (const auto& v : std::get<ValueSet>(c)) {
    if (!first) out += ", ";
    first = false;
    out += format_value(v);
  }
  return out + "}";
}

namespace {

ValueSet restrict(const ValueSet& values, const Interval& iv) {
  ValueSet out;
  for (const auto& v : values) {
    if (is_numeric(type_of(v)) && iv.contains(as_double(v))) out.insert(v);
  }
  return out;
}

Constraint intersect(const Constraint& a, const Constraint& b, const std::string& column) {
  auto unsat = [&] {
    return Error(ErrorCode::kUnsatisfiablePredicate,
                 "constraints on '" + column + "' have an empty intersection: " +
                     inferq::to_string(a) + " and " + inferq::to_string(b));
  };
  const auto* ia = std::get_if<Interval>(&a);
  const auto* ib = std::get_if<Interval>(&b);
  if (ia && ib) {
    auto r = ia->intersect(*ib);
    if (!r) throw unsat();
    return *r;
  }
  ValueSet out;
  if (ia) {
    out = restrict(std::get<ValueSet>(b), *ia);
  } else if (ib) {
    out = restrict(std::get<ValueSet>(a), *ib);
  } else {
    const auto& sa = std::get<ValueSet>(a);
    const auto& sb = std::get<ValueSet>(b);
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                          std::inserter(out, out.begin()));
  }
  if (out.empty()) throw unsat();
  return out;
}

}  // namespace

void DomainConstraints::add(const std::string& column, const Constraint& c) {
  if (const auto* vs = std::get_if<ValueSet>(&c); vs && vs->empty()) {
    throw Error(ErrorCode::kUnsatisfiablePredicate, "empty value set for '" + column + "'");
  }
  auto it = facts_.find(column);
  if (it == facts_.end()) {
    facts_.emplace(column, c);
    return;
  }
  it->second = intersect(it->second, c, column);
}

void DomainConstraints::merge(const DomainConstraints& other) {
  for (const auto& [column, c] : other.facts_) add(column, c);
}

const Constraint* DomainConstraints::find(const std::string& column) const {
  auto it = facts_.find(column);
  return it == facts_.end() ? nullptr : &it->second;
}

std::optional<Interval> DomainConstraints::interval_for(const std::string& column) const {
  const Constraint* c = find(column);
  if (c == nullptr) return std::nullopt;
  if (const auto* iv = std::get_if<Interval>(c)) return *iv;
  double lo = kInf, hi = -kInf;
  for (const auto& v : std::get<ValueSet>(*c)) {
    if (!is_numeric(type_of(v))) return std::nullopt;
    const double d = as_double(v);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return Interval(lo, true, hi, true);
}

std::string DomainConstraints::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [column, c] : facts_) {
    if (!first) out += ", ";
    first = false;
    out += column + ": " + inferq::to_string(c);
  }
  return out + "}";
}

}  // namespace inferq
