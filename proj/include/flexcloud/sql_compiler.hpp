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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexcloud/rec_algebra.hpp"

namespace flexcloud {

enum class SqlDialect { kAnsi };

std::optional<SqlDialect> parse_sql_dialect(std::string_view name);

// Ordinal column every table carries: base tables are loaded with their
// 0-based store position, temp tables derive it from their inputs.
inline constexpr std::string_view kOrdinalColumn = "_ord";

struct SqlScript {
  std::vector<std::string> statements;    // run in order on a fresh session
  std::vector<std::string> temp_objects;  // every temp table created
  std::vector<std::string> required_udfs; // scalar functions the host registers
  RelationDef output;                     // layout of the final SELECT; map columns arrive as map text

  // Statements separated by "-- statement N" comment lines.
  std::string to_text() const;
};

// Compiles a workflow into temp-table statements ending in one SELECT whose
// rows and order equal eval_workflow. Parameter values are inlined as
// escaped literals. Throws kUnsupportedDialect or the validation errors.
SqlScript compile_sql(const WorkflowAst& ast, const Schema& schema, const Params& args,
                      SqlDialect dialect = SqlDialect::kAnsi);

// "k1:v1;k2:v2" with ascending keys and shortest round-trip floats; "" for
// the empty map.
std::string canonical_map_text(const RatingMap& map);

// Inverse of canonical_map_text. Accepts any finite decimal value spelling
// but requires strictly ascending keys. Throws kMapText.
RatingMap parse_map_text(std::string_view text);

}  // namespace flexcloud
