// Copyright 2026 The FlexCloud Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flexcloud {

enum class ColumnType { kInt, kFloat, kText, kMap };

std::string_view column_type_name(ColumnType type);
std::optional<ColumnType> parse_column_type(std::string_view name);

inline bool is_numeric(ColumnType type) {
  return type == ColumnType::kInt || type == ColumnType::kFloat;
}

// Finite map from item key to rating; std::map keeps keys unique and
// iteration in ascending key order.
using RatingMap = std::map<std::int64_t, double>;

struct Null {
  friend bool operator==(Null, Null) = default;
};

class Value {
 public:
  using Storage = std::variant<Null, std::int64_t, double, std::string, RatingMap>;

  Value() = default;
  Value(Null) {}
  Value(std::int64_t v) : data_(v) {}
  Value(int v) : data_(static_cast<std::int64_t>(v)) {}
  Value(double v) : data_(v) {}
  Value(std::string v) : data_(std::move(v)) {}
  Value(const char* v) : data_(std::string(v)) {}
  Value(RatingMap v) : data_(std::move(v)) {}

  bool is_null() const { return std::holds_alternative<Null>(data_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  bool is_text() const { return std::holds_alternative<std::string>(data_); }
  bool is_map() const { return std::holds_alternative<RatingMap>(data_); }
  bool is_numeric() const { return is_int() || is_float(); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  const std::string& as_text() const { return std::get<std::string>(data_); }
  const RatingMap& as_map() const { return std::get<RatingMap>(data_); }

  // Int or Float widened to double.
  double as_number() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }

  const Storage& storage() const { return data_; }

  // Structural equality: Null == Null, Int 1 != Float 1.0. Used for
  // snapshot round-trips and test comparisons, not predicate semantics.
  friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

 private:
  Storage data_;
};

using Tuple = std::vector<Value>;

bool value_matches_type(const Value& value, ColumnType type);

// Predicate comparison with SQL-style Null semantics: any comparison
// involving Null yields nullopt. Int and Float compare numerically, Text
// compares byte-wise. Returns nullopt for incomparable kinds.
std::optional<std::partial_ordering> compare_values(const Value& a, const Value& b);

// Total order used for primary keys and entity ids (Int numeric, Text
// byte-wise; Null sorts first).
std::strong_ordering key_order(const Value& a, const Value& b);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string value_to_display(const Value& value);

}  // namespace flexcloud
