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

#include <filesystem>
#include <string>

#include "flexcloud/relstore.hpp"

namespace flexcloud::support {

std::filesystem::path source_dir();
std::filesystem::path data_dir();
Schema fixture_schema();
Store fixture_store();

// Column layouts and row order must match exactly; Float cells and map
// values may differ by `tol`. On mismatch `why` describes the first one.
bool same_relation(const Relation& a, const Relation& b, double tol, std::string* why = nullptr);

std::string describe(const Tuple& t);

}  // namespace flexcloud::support
