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

#include "flexcloud/value.hpp"

#include <array>
#include <charconv>

namespace flexcloud {

std::string_view column_type_name(ColumnType type) {
  switch (type) {
    case ColumnType::kInt: return "int";
    case ColumnType::kFloat: return "float";
    case ColumnType::kText: return "text";
    case ColumnType::kMap: return "map";
  }
  return "text";
}

std::optional<ColumnType> parse_column_type(std::string_view name) {
  if (name == "int") return ColumnType::kInt;
  if (name == "float") return ColumnType::kFloat;
  if (name == "text") return ColumnType::kText;
  if (name == "map") return ColumnType::kMap;
  return std::nullopt;
}

bool value_matches_type(const Value& value, ColumnType type) {
  if (value.is_null()) return true;
  switch (type) {
    case ColumnType::kInt: return value.is_int();
    case ColumnType::kFloat: return value.is_float();
    case ColumnType::kText: return value.is_text();
    case ColumnType::kMap: return value.is_map();
  }
  return false;
}

std::optional<std::partial_ordering> compare_values(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return std::nullopt;
  if (a.is_int() && b.is_int()) return a.as_int() <=> b.as_int();
  if (a.is_numeric() && b.is_numeric()) return a.as_number() <=> b.as_number();
  if (a.is_text() && b.is_text()) {
    const int c = a.as_text().compare(b.as_text());
    return c < 0 ? std::partial_ordering::less
                 : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
  }
  return std::nullopt;
}

std::strong_ordering key_order(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return b.is_null() <=> a.is_null();
  if (a.is_int() && b.is_int()) return a.as_int() <=> b.as_int();
  if (a.is_text() && b.is_text()) {
    const int c = a.as_text().compare(b.as_text());
    return c <=> 0;
  }
  if (a.is_float() && b.is_float()) {
    const auto c = a.as_float() <=> b.as_float();
    if (c == std::partial_ordering::less) return std::strong_ordering::less;
    if (c == std::partial_ordering::greater) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  return a.storage().index() <=> b.storage().index();
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string value_to_display(const Value& value) {
  if (value.is_null()) return "";
  if (value.is_int()) return std::to_string(value.as_int());
  if (value.is_float()) return format_double(value.as_float());
  if (value.is_text()) return value.as_text();
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : value.as_map()) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(k) + ": " + format_double(v);
  }
  return out + "}";
}

}  // namespace flexcloud
