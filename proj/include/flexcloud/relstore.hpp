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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexcloud/value.hpp"

namespace flexcloud {

struct ColumnDef {
  std::string name;
  ColumnType type = ColumnType::kText;

  friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

// Column layout of a base or derived relation. Base relations always carry a
// primary key; derived relations may lose it (e.g. after a join).
struct RelationDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::optional<std::string> primary_key;

  std::optional<std::size_t> column_index(std::string_view column) const;
  std::optional<std::size_t> primary_key_index() const;
  std::size_t arity() const { return columns.size(); }

  friend bool operator==(const RelationDef&, const RelationDef&) = default;
};

struct Schema {
  std::vector<RelationDef> relations;

  const RelationDef* find(std::string_view name) const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

struct Relation {
  RelationDef def;
  std::vector<Tuple> tuples;

  std::size_t size() const { return tuples.size(); }
  bool empty() const { return tuples.empty(); }

  friend bool operator==(const Relation&, const Relation&) = default;
};

// Immutable once constructed: every downstream module sees it through a
// const reference or a shared_ptr<const Store>.
class Store {
 public:
  Store() = default;
  // Relations must follow schema order and satisfy the schema.
  Store(Schema schema, std::vector<Relation> relations);

  const Schema& schema() const { return schema_; }
  const std::vector<Relation>& relations() const { return relations_; }
  const Relation* find(std::string_view name) const;

  friend bool operator==(const Store&, const Store&) = default;

 private:
  Schema schema_;
  std::vector<Relation> relations_;
};

bool is_identifier(std::string_view text);
bool is_valid_utf8(std::string_view text);

// Parses and validates the schema JSON document.
Schema load_schema(std::string_view document);

// RFC 4180 CSV with a header row naming every column exactly once (any
// order). Empty cells become Null. Errors report the 1-based record number,
// counting the header as record 1.
Relation ingest_csv(const Schema& schema, std::string_view relation_name, std::string_view csv);

// Reads <dir>/<Relation>.csv for every relation in the schema.
Store ingest_directory(const Schema& schema, const std::filesystem::path& dir);

void snapshot_save(const Store& store, std::ostream& out);
std::string snapshot_save(const Store& store);
Store snapshot_load(std::istream& in);
Store snapshot_load(std::string_view bytes);
Store snapshot_load_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace flexcloud
