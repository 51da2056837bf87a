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

#ifndef INFERQ_DOMAIN_H_
#define INFERQ_DOMAIN_H_

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "inferq/value.h"

namespace inferq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Non-empty interval over the extended reals. Infinite endpoints are open.
class Interval {
 public:
  // Throws UnsatisfiablePredicate when the bounds describe an empty set.
  Interval(double lo, bool lo_closed, double hi, bool hi_closed);

  static Interval all() { return Interval(-kInf, false, kInf, false); }
  static Interval point(double v) { return Interval(v, true, v, true); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool lo_closed() const { return lo_closed_; }
  bool hi_closed() const { return hi_closed_; }

  bool contains(double v) const;
  // Every member is < t.
  bool below(double t) const { return hi_ < t || (hi_ == t && !hi_closed_); }
  // Every member is >= t.
  bool at_or_above(double t) const { return lo_ >= t; }

  // Empty intersections yield nullopt.
  std::optional<Interval> intersect(const Interval& other) const;

  bool operator==(const Interval&) const = default;
  std::string to_string() const;

 private:
  double lo_, hi_;
  bool lo_closed_, hi_closed_;
};

using ValueSet = std::set<Value>;
using Constraint = std::variant<Interval, ValueSet>;

std::string to_string(const Constraint& c);

// Per-column facts. Adding a second fact for a column intersects the two.
class DomainConstraints {
 public:
  DomainConstraints() = default;

  // Throws UnsatisfiablePredicate if the result would be empty.
  void add(const std::string& column, const Constraint& c);
  void merge(const DomainConstraints& other);

  const Constraint* find(const std::string& column) const;
  // Interval implied for a numeric column, if any. ValueSets of numbers map
  // to their closed hull; non-numeric ValueSets give nullopt.
  std::optional<Interval> interval_for(const std::string& column) const;

  bool empty() const { return facts_.empty(); }
  size_t size() const { return facts_.size(); }
  const std::map<std::string, Constraint>& facts() const { return facts_; }

  bool operator==(const DomainConstraints&) const = default;
  std::string to_string() const;

 private:
  std::map<std::string, Constraint> facts_;
};

}  // namespace inferq

#endif  // INFERQ_DOMAIN_H_
