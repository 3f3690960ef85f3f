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

#include "common.hpp"

#include <cmath>

namespace flexcloud::support {

std::filesystem::path source_dir() { return FLEXCLOUD_SOURCE_DIR; }
std::filesystem::path data_dir() { return source_dir() / "data"; }

Schema fixture_schema() { return load_schema(read_file(data_dir() / "fixture" / "schema.json")); }

Store fixture_store() { return ingest_directory(fixture_schema(), data_dir() / "fixture"); }

namespace {

bool close(double a, double b, double tol) { return a == b || std::fabs(a - b) <= tol; }

bool same_value(const Value& a, const Value& b, double tol) {
  if (a.is_float() && b.is_float()) return close(a.as_float(), b.as_float(), tol);
  if (a.is_map() && b.is_map()) {
    const auto& x = a.as_map();
    const auto& y = b.as_map();
    if (x.size() != y.size()) return false;
    for (auto i = x.begin(), j = y.begin(); i != x.end(); ++i, ++j) {
      if (i->first != j->first || !close(i->second, j->second, tol)) return false;
    }
    return true;
  }
  return a == b;
}

}  // namespace

std::string describe(const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + value_to_display(t[i]);
  return s + ")";
}

bool same_relation(const Relation& a, const Relation& b, double tol, std::string* why) {
  const auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (a.def.columns != b.def.columns) return fail("column layouts differ");
  if (a.tuples.size() != b.tuples.size()) {
    return fail("row counts differ: " + std::to_string(a.tuples.size()) + " vs " + std::to_string(b.tuples.size()));
  }
  for (std::size_t r = 0; r < a.tuples.size(); ++r) {
    for (std::size_t c = 0; c < a.def.columns.size(); ++c) {
      if (!same_value(a.tuples[r][c], b.tuples[r][c], tol)) {
        return fail("row " + std::to_string(r) + ": " + describe(a.tuples[r]) + " vs " + describe(b.tuples[r]));
      }
    }
  }
  return true;
}

}  // namespace flexcloud::support
