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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexcloud/rec_algebra.hpp"

namespace flexcloud {

struct SourceSpan {
  std::size_t start = 0;  // byte offsets, end exclusive
  std::size_t end = 0;
  std::size_t line = 1;  // 1-based, of `start`
  std::size_t column = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { kError, kWarning };

struct ParseDiagnostic {
  Severity severity = Severity::kError;
  std::string message;
  SourceSpan span;
};

std::string format_diagnostic(const ParseDiagnostic& diag, std::string_view origin = {});

// Either a complete AST or at least one error diagnostic, never both.
struct ParseOutcome {
  std::optional<WorkflowAst> ast;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return ast.has_value(); }
};

// Parses workflow source text (.frx). Never throws on malformed input.
ParseOutcome parse_workflow(std::string_view source);

// Throws kParse carrying the first diagnostic.
WorkflowAst parse_workflow_or_throw(std::string_view source, std::string_view origin = {});

// Canonical text: two-space indented bindings, explicit agg, nested
// operator expressions parenthesized.
std::string format_workflow(const WorkflowAst& ast);

bool is_reserved_word(std::string_view word);

}  // namespace flexcloud
