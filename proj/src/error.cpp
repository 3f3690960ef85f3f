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

#include "flexcloud/error.hpp"

namespace flexcloud {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "PARSE_ERROR";
    case ErrorCode::kSchema: return "SCHEMA_ERROR";
    case ErrorCode::kCsv: return "CSV_ERROR";
    case ErrorCode::kSnapshot: return "SNAPSHOT_ERROR";
    case ErrorCode::kSpec: return "SPEC_ERROR";
    case ErrorCode::kEmptyQuery: return "EMPTY_QUERY";
    case ErrorCode::kBadQuery: return "BAD_QUERY";
    case ErrorCode::kStaleTerm: return "STALE_TERM";
    case ErrorCode::kUnknownRelation: return "UNKNOWN_RELATION";
    case ErrorCode::kUnknownColumn: return "UNKNOWN_COLUMN";
    case ErrorCode::kTypeMismatch: return "TYPE_MISMATCH";
    case ErrorCode::kNameCollision: return "NAME_COLLISION";
    case ErrorCode::kModeType: return "MODE_TYPE_ERROR";
    case ErrorCode::kValidation: return "VALIDATION_ERROR";
    case ErrorCode::kUnboundParam: return "UNBOUND_PARAM";
    case ErrorCode::kUnknownParam: return "UNKNOWN_PARAM";
    case ErrorCode::kParamType: return "PARAM_TYPE";
    case ErrorCode::kMapText: return "MAP_TEXT_ERROR";
    case ErrorCode::kUnsupportedDialect: return "UNSUPPORTED_DIALECT";
    case ErrorCode::kUnknownEntity: return "UNKNOWN_ENTITY";
    case ErrorCode::kUnknownWorkflow: return "UNKNOWN_WORKFLOW";
    case ErrorCode::kNotFound: return "NOT_FOUND";
    case ErrorCode::kInternal: return "INTERNAL";
  }
  return "INTERNAL";
}

int error_http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownEntity:
    case ErrorCode::kUnknownWorkflow:
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kStaleTerm:
      return 409;
    case ErrorCode::kUnknownRelation:
    case ErrorCode::kUnknownColumn:
    case ErrorCode::kTypeMismatch:
    case ErrorCode::kNameCollision:
    case ErrorCode::kModeType:
    case ErrorCode::kValidation:
      return 422;
    case ErrorCode::kSnapshot:
    case ErrorCode::kInternal:
      return 500;
    default:
      return 400;
  }
}

}  // namespace flexcloud
