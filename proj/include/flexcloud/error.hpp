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

#include <stdexcept>
#include <string>
#include <string_view>

namespace flexcloud {

// Every failure the engine can report. Each code maps to exactly one
// machine-readable name and one HTTP status at the service boundary.
enum class ErrorCode {
  kParse,
  kSchema,
  kCsv,
  kSnapshot,
  kSpec,
  kEmptyQuery,
  kBadQuery,
  kStaleTerm,
  kUnknownRelation,
  kUnknownColumn,
  kTypeMismatch,
  kNameCollision,
  kModeType,
  kValidation,
  kUnboundParam,
  kUnknownParam,
  kParamType,
  kMapText,
  kUnsupportedDialect,
  kUnknownEntity,
  kUnknownWorkflow,
  kNotFound,
  kInternal,
};

std::string_view error_code_name(ErrorCode code);
int error_http_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace flexcloud
