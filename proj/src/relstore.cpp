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

#include "flexcloud/relstore.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flexcloud/error.hpp"

namespace flexcloud {

using nlohmann::json;

std::optional<std::size_t> RelationDef::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> RelationDef::primary_key_index() const {
  if (!primary_key) return std::nullopt;
  return column_index(*primary_key);
}

const RelationDef* Schema::find(std::string_view name) const {
  for (const auto& rel : relations) {
    if (rel.name == name) return &rel;
  }
  return nullptr;
}

Store::Store(Schema schema, std::vector<Relation> relations)
    : schema_(std::move(schema)), relations_(std::move(relations)) {
  if (relations_.size() != schema_.relations.size()) {
    throw Error(ErrorCode::kSchema, "store: relation count does not match schema");
  }
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto& rel = relations_[i];
    if (!(rel.def == schema_.relations[i])) {
      throw Error(ErrorCode::kSchema, "store: relation '" + rel.def.name + "' does not match schema");
    }
    const auto pk = rel.def.primary_key_index();
    std::set<std::int64_t> int_keys;
    std::set<std::string> text_keys;
    for (const auto& t : rel.tuples) {
      if (t.size() != rel.def.arity()) {
        throw Error(ErrorCode::kSchema, "store: relation '" + rel.def.name + "' has a tuple of wrong arity");
      }
      for (std::size_t c = 0; c < t.size(); ++c) {
        if (!value_matches_type(t[c], rel.def.columns[c].type)) {
          throw Error(ErrorCode::kSchema, "store: relation '" + rel.def.name + "' column '" +
                                              rel.def.columns[c].name + "' has a mistyped value");
        }
      }
      if (!pk) continue;
      const Value& key = t[*pk];
      const bool fresh = key.is_int()    ? int_keys.insert(key.as_int()).second
                         : key.is_text() ? text_keys.insert(key.as_text()).second
                                         : false;
      if (!fresh) {
        throw Error(ErrorCode::kSchema, "store: relation '" + rel.def.name +
                                            "' has a null or duplicate primary key");
      }
    }
  }
}

const Relation* Store::find(std::string_view name) const {
  for (const auto& rel : relations_) {
    if (rel.def.name == name) return &rel;
  }
  return nullptr;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  const auto head = static_cast<unsigned char>(text.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_')) return false;
  }
  return true;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= text.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Schema

namespace {

[[noreturn]] void schema_error(const std::string& relation, const std::string& message) {
  throw Error(ErrorCode::kSchema, "relation '" + relation + "': " + message);
}

}  // namespace

Schema load_schema(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("schema: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("relations") || !doc["relations"].is_array()) {
    throw Error(ErrorCode::kSchema, "schema: expected an object with a 'relations' array");
  }
  Schema schema;
  std::set<std::string> names;
  std::size_t position = 0;
  for (const auto& rel : doc["relations"]) {
    const std::string fallback = "#" + std::to_string(position++);
    if (!rel.is_object() || !rel.contains("name") || !rel["name"].is_string()) {
      schema_error(fallback, "missing 'name'");
    }
    RelationDef def;
    def.name = rel["name"].get<std::string>();
    if (!is_identifier(def.name)) schema_error(def.name, "name is not an identifier");
    if (!names.insert(def.name).second) schema_error(def.name, "duplicate relation name");
    if (!rel.contains("columns") || !rel["columns"].is_array()) {
      schema_error(def.name, "missing 'columns' array");
    }
    std::set<std::string> columns;
    for (const auto& col : rel["columns"]) {
      if (!col.is_object() || !col.contains("name") || !col["name"].is_string() ||
          !col.contains("type") || !col["type"].is_string()) {
        schema_error(def.name, "column entries need string 'name' and 'type'");
      }
      ColumnDef cd;
      cd.name = col["name"].get<std::string>();
      if (!is_identifier(cd.name)) schema_error(def.name, "column '" + cd.name + "' is not an identifier");
      const auto type = parse_column_type(col["type"].get<std::string>());
      if (!type || *type == ColumnType::kMap) {
        schema_error(def.name, "column '" + cd.name + "' has unknown type '" +
                                   col["type"].get<std::string>() + "'");
      }
      cd.type = *type;
      if (!columns.insert(cd.name).second) {
        schema_error(def.name, "duplicate column '" + cd.name + "'");
      }
      def.columns.push_back(std::move(cd));
    }
    if (!rel.contains("primary_key") || !rel["primary_key"].is_string()) {
      schema_error(def.name, "missing 'primary_key'");
    }
    def.primary_key = rel["primary_key"].get<std::string>();
    const auto pk = def.primary_key_index();
    if (!pk) schema_error(def.name, "primary key '" + *def.primary_key + "' is not a column");
    const auto pk_type = def.columns[*pk].type;
    if (pk_type != ColumnType::kInt && pk_type != ColumnType::kText) {
      schema_error(def.name, "primary key '" + *def.primary_key + "' must be int or text");
    }
    schema.relations.push_back(std::move(def));
  }
  return schema;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct CsvRecord {
  std::vector<std::string> fields;
};

[[noreturn]] void csv_error(std::string_view relation, std::size_t row, const std::string& message) {
  throw Error(ErrorCode::kCsv,
              std::string(relation) + ".csv row " + std::to_string(row) + ": " + message);
}

// RFC 4180 record splitter. Accepts LF or CRLF line endings; a trailing line
// break at end of input does not start a new record.
std::vector<CsvRecord> split_csv(std::string_view relation, std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    CsvRecord record;
    std::string field;
    bool record_done = false;
    while (!record_done) {
      field.clear();
      if (i < n && text[i] == '"') {
        ++i;
        bool closed = false;
        while (i < n) {
          if (text[i] == '"') {
            if (i + 1 < n && text[i + 1] == '"') {
              field += '"';
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            field += text[i++];
          }
        }
        if (!closed) csv_error(relation, records.size() + 1, "unterminated quoted field");
        if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          csv_error(relation, records.size() + 1, "unexpected character after closing quote");
        }
      } else {
        while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          if (text[i] == '"') csv_error(relation, records.size() + 1, "stray quote in unquoted field");
          field += text[i++];
        }
      }
      record.fields.push_back(field);
      if (i >= n) {
        record_done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        if (text[i] == '\r') {
          ++i;
          if (i < n && text[i] == '\n') ++i;
        } else {
          ++i;
        }
        record_done = true;
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

Value parse_cell(std::string_view relation, std::size_t row, const ColumnDef& col,
                 const std::string& cell) {
  if (cell.empty()) return Value();
  switch (col.type) {
    case ColumnType::kInt: {
      std::int64_t v = 0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        csv_error(relation, row, "column '" + col.name + "': '" + cell + "' is not an int");
      }
      return Value(v);
    }
    case ColumnType::kFloat: {
      double v = 0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        csv_error(relation, row, "column '" + col.name + "': '" + cell + "' is not a finite float");
      }
      return Value(v);
    }
    case ColumnType::kText:
      if (!is_valid_utf8(cell)) {
        csv_error(relation, row, "column '" + col.name + "': invalid UTF-8");
      }
      return Value(cell);
    case ColumnType::kMap:
      break;
  }
  csv_error(relation, row, "column '" + col.name + "' cannot be loaded from CSV");
}

}  // namespace

Relation ingest_csv(const Schema& schema, std::string_view relation_name, std::string_view csv) {
  const RelationDef* def = schema.find(relation_name);
  if (!def) {
    throw Error(ErrorCode::kUnknownRelation,
                "unknown relation '" + std::string(relation_name) + "'");
  }
  if (csv.size() >= 3 && csv.substr(0, 3) == "\xEF\xBB\xBF") csv.remove_prefix(3);
  const auto records = split_csv(relation_name, csv);
  if (records.empty()) csv_error(relation_name, 1, "missing header row");

  // header position -> column index
  const auto& header = records.front().fields;
  std::vector<std::size_t> slot(header.size());
  std::vector<bool> seen(def->arity(), false);
  for (std::size_t h = 0; h < header.size(); ++h) {
    const auto idx = def->column_index(header[h]);
    if (!idx) csv_error(relation_name, 1, "unknown column '" + header[h] + "' in header");
    if (seen[*idx]) csv_error(relation_name, 1, "duplicate column '" + header[h] + "' in header");
    seen[*idx] = true;
    slot[h] = *idx;
  }
  for (std::size_t c = 0; c < def->arity(); ++c) {
    if (!seen[c]) csv_error(relation_name, 1, "header is missing column '" + def->columns[c].name + "'");
  }

  Relation rel{*def, {}};
  rel.tuples.reserve(records.size() - 1);
  const std::size_t pk = *def->primary_key_index();
  std::set<std::int64_t> int_keys;
  std::set<std::string> text_keys;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const std::size_t row = r + 1;
    const auto& fields = records[r].fields;
    if (fields.size() != header.size()) {
      csv_error(relation_name, row,
                "expected " + std::to_string(header.size()) + " fields, found " +
                    std::to_string(fields.size()));
    }
    Tuple tuple(def->arity());
    for (std::size_t h = 0; h < fields.size(); ++h) {
      tuple[slot[h]] = parse_cell(relation_name, row, def->columns[slot[h]], fields[h]);
    }
    const Value& key = tuple[pk];
    if (key.is_null()) csv_error(relation_name, row, "primary key '" + *def->primary_key + "' is empty");
    const bool fresh = key.is_int() ? int_keys.insert(key.as_int()).second
                                    : text_keys.insert(key.as_text()).second;
    if (!fresh) {
      csv_error(relation_name, row,
                "duplicate primary key " + *def->primary_key + "=" + value_to_display(key));
    }
    rel.tuples.push_back(std::move(tuple));
  }
  return rel;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Store ingest_directory(const Schema& schema, const std::filesystem::path& dir) {
  std::vector<Relation> relations;
  for (const auto& def : schema.relations) {
    const auto path = dir / (def.name + ".csv");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kCsv, "missing data file '" + path.string() + "'");
    }
    relations.push_back(ingest_csv(schema, def.name, read_file(path)));
  }
  return Store(schema, std::move(relations));
}

// ---------------------------------------------------------------------------
// Snapshot: versioned JSON lines.
//   {"flexcloud_snapshot":1}
//   {"relation":{...def...},"rows":N}
//   [v0,v1,...]            (N lines)

namespace {

constexpr int kSnapshotVersion = 1;

json value_to_json(const Value& v) {
  if (v.is_null()) return nullptr;
  if (v.is_int()) return v.as_int();
  if (v.is_float()) return v.as_float();
  if (v.is_text()) return v.as_text();
  json obj = json::object();
  for (const auto& [k, r] : v.as_map()) obj[std::to_string(k)] = r;
  return obj;
}

[[noreturn]] void snapshot_error(const std::string& message) {
  throw Error(ErrorCode::kSnapshot, "snapshot: " + message);
}

Value value_from_json(const json& j, ColumnType type) {
  if (j.is_null()) return Value();
  switch (type) {
    case ColumnType::kInt:
      if (j.is_number_integer()) return Value(j.get<std::int64_t>());
      break;
    case ColumnType::kFloat:
      if (j.is_number()) return Value(j.get<double>());
      break;
    case ColumnType::kText:
      if (j.is_string()) return Value(j.get<std::string>());
      break;
    case ColumnType::kMap:
      if (j.is_object()) {
        RatingMap m;
        for (const auto& [k, r] : j.items()) {
          std::int64_t key = 0;
          auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), key);
          if (ec != std::errc() || ptr != k.data() + k.size() || !r.is_number()) {
            snapshot_error("bad map entry");
          }
          m[key] = r.get<double>();
        }
        return Value(std::move(m));
      }
      break;
  }
  snapshot_error("value does not match column type " + std::string(column_type_name(type)));
}

}  // namespace

void snapshot_save(const Store& store, std::ostream& out) {
  out << json{{"flexcloud_snapshot", kSnapshotVersion}}.dump() << '\n';
  for (const auto& rel : store.relations()) {
    json cols = json::array();
    for (const auto& c : rel.def.columns) {
      cols.push_back({{"name", c.name}, {"type", std::string(column_type_name(c.type))}});
    }
    json header = {{"relation",
                    {{"name", rel.def.name},
                     {"primary_key", rel.def.primary_key ? json(*rel.def.primary_key) : json()},
                     {"columns", cols}}},
                   {"rows", rel.tuples.size()}};
    out << header.dump() << '\n';
    for (const auto& t : rel.tuples) {
      json row = json::array();
      for (const auto& v : t) row.push_back(value_to_json(v));
      out << row.dump() << '\n';
    }
  }
}

std::string snapshot_save(const Store& store) {
  std::ostringstream out;
  snapshot_save(store, out);
  return out.str();
}

Store snapshot_load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) snapshot_error("empty input");
  json head;
  try {
    head = json::parse(line);
  } catch (const json::parse_error&) {
    snapshot_error("bad header line");
  }
  if (!head.is_object() || !head.contains("flexcloud_snapshot") ||
      !head["flexcloud_snapshot"].is_number_integer()) {
    snapshot_error("missing flexcloud_snapshot header");
  }
  if (head["flexcloud_snapshot"].get<int>() != kSnapshotVersion) {
    snapshot_error("unsupported version " + head["flexcloud_snapshot"].dump());
  }
  Schema schema;
  std::vector<Relation> relations;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json section;
    try {
      section = json::parse(line);
      const auto& r = section.at("relation");
      RelationDef def;
      def.name = r.at("name").get<std::string>();
      if (!r.at("primary_key").is_null()) def.primary_key = r.at("primary_key").get<std::string>();
      for (const auto& c : r.at("columns")) {
        const auto type = parse_column_type(c.at("type").get<std::string>());
        if (!type) snapshot_error("unknown column type");
        def.columns.push_back({c.at("name").get<std::string>(), *type});
      }
      const auto count = section.at("rows").get<std::int64_t>();
      if (count < 0) snapshot_error("negative row count");
      Relation rel{def, {}};
      for (std::int64_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) {
          snapshot_error("truncated: relation '" + def.name + "' declares " +
                         std::to_string(count) + " rows, found " + std::to_string(i));
        }
        const json row = json::parse(line);
        if (!row.is_array() || row.size() != def.arity()) {
          snapshot_error("relation '" + def.name + "' row " + std::to_string(i + 1) +
                         " has wrong arity");
        }
        Tuple t;
        t.reserve(def.arity());
        for (std::size_t c = 0; c < def.arity(); ++c) {
          t.push_back(value_from_json(row[c], def.columns[c].type));
        }
        rel.tuples.push_back(std::move(t));
      }
      schema.relations.push_back(def);
      relations.push_back(std::move(rel));
    } catch (const json::exception& e) {
      snapshot_error(std::string("malformed section: ") + e.what());
    }
  }
  try {
    return Store(std::move(schema), std::move(relations));
  } catch (const Error& e) {
    snapshot_error(e.what());
  }
}

Store snapshot_load(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  return snapshot_load(in);
}

Store snapshot_load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) snapshot_error("cannot open '" + path.string() + "'");
  return snapshot_load(in);
}

}  // namespace flexcloud
