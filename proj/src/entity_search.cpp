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

#include "flexcloud/entity_search.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "flexcloud/error.hpp"

namespace flexcloud {

using nlohmann::json;

namespace {

[[noreturn]] void spec_error(const std::string& message) {
  throw Error(ErrorCode::kSpec, "entity spec: " + message);
}

std::vector<FieldSpec> fields_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) spec_error(where + " must be an array of [column, weight] pairs");
  std::vector<FieldSpec> out;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number()) {
      spec_error(where + " entries must be [column, weight] pairs");
    }
    out.push_back({pair[0].get<std::string>(), pair[1].get<double>()});
  }
  return out;
}

json fields_to_json(const std::vector<FieldSpec>& fields) {
  json out = json::array();
  for (const auto& f : fields) out.push_back(json::array({f.column, f.weight}));
  return out;
}

}  // namespace

EntitySpec EntitySpec::from_json(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("entity spec: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) spec_error("expected an object");
  EntitySpec spec;
  if (!doc.contains("name") || !doc["name"].is_string()) spec_error("missing 'name'");
  if (!doc.contains("root") || !doc["root"].is_string()) spec_error("missing 'root'");
  spec.name = doc["name"].get<std::string>();
  spec.root = doc["root"].get<std::string>();
  if (doc.contains("root_fields")) spec.root_fields = fields_from_json(doc["root_fields"], "root_fields");
  if (doc.contains("parts")) {
    if (!doc["parts"].is_array()) spec_error("'parts' must be an array");
    for (const auto& p : doc["parts"]) {
      if (!p.is_object() || !p.contains("relation") || !p["relation"].is_string()) {
        spec_error("part needs a 'relation'");
      }
      PartSpec part;
      part.relation = p["relation"].get<std::string>();
      const auto& join = p.value("join", json());
      if (!join.is_array() || join.size() != 2 || !join[0].is_string() || !join[1].is_string()) {
        spec_error("part '" + part.relation + "' needs 'join': [root column, part column]");
      }
      part.root_column = join[0].get<std::string>();
      part.part_column = join[1].get<std::string>();
      part.fields = fields_from_json(p.value("fields", json::array()), "part '" + part.relation + "' fields");
      spec.parts.push_back(std::move(part));
    }
  }
  return spec;
}

std::string EntitySpec::to_json() const {
  json parts_json = json::array();
  for (const auto& p : parts) {
    parts_json.push_back({{"relation", p.relation},
                          {"join", json::array({p.root_column, p.part_column})},
                          {"fields", fields_to_json(p.fields)}});
  }
  json doc = {{"name", name},
              {"root", root},
              {"root_fields", fields_to_json(root_fields)},
              {"parts", parts_json}};
  return doc.dump();
}

EntitySpec default_course_spec() {
  EntitySpec spec;
  spec.name = "course";
  spec.root = "Courses";
  spec.root_fields = {{"Title", 3.0}, {"Description", 2.0}};
  spec.parts = {PartSpec{"Comments", "CourseID", "CourseID", {{"Text", 1.0}}}};
  return spec;
}

std::string QueryTerm::text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

QueryTerm QueryTerm::from_text(std::string_view term) {
  QueryTerm q;
  q.tokens = tokenize(term);
  if (q.tokens.empty() || q.tokens.size() > 2) {
    throw Error(ErrorCode::kBadQuery, "term '" + std::string(term) + "' must hold one or two words");
  }
  return q;
}

std::vector<QueryTerm> parse_query(std::string_view text) {
  std::vector<QueryTerm> terms;
  const auto add = [&](QueryTerm t) {
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(std::move(t));
  };
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '"') {
      const auto close = text.find('"', i + 1);
      if (close == std::string_view::npos) throw Error(ErrorCode::kBadQuery, "unterminated quote in query");
      const auto tokens = tokenize(text.substr(i + 1, close - i - 1));
      if (tokens.size() > 2) {
        throw Error(ErrorCode::kBadQuery, "phrase '" + std::string(text.substr(i + 1, close - i - 1)) +
                                              "' holds more than two words");
      }
      if (!tokens.empty()) add(QueryTerm{tokens});
      i = close + 1;
    } else {
      auto next = text.find('"', i);
      if (next == std::string_view::npos) next = text.size();
      for (auto& tok : tokenize(text.substr(i, next - i))) add(QueryTerm{{std::move(tok)}});
      i = next;
    }
  }
  return terms;
}

std::string format_query(const std::vector<QueryTerm>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ' ';
    out += t.is_bigram() ? "\"" + t.text() + "\"" : t.text();
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::uint32_t> SearchIndex::term_id(std::string_view term) const {
  const auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t SearchIndex::intern(const std::string& term, bool bigram) {
  const auto [it, inserted] = term_ids_.emplace(term, static_cast<std::uint32_t>(vocabulary_.size()));
  if (inserted) {
    vocabulary_.push_back(term);
    bigram_.push_back(bigram);
    postings_.emplace_back();
    document_frequency_.push_back(0);
  }
  return it->second;
}

namespace {

std::size_t require_text_column(const RelationDef& def, const FieldSpec& f) {
  const auto idx = def.column_index(f.column);
  if (!idx) spec_error("relation '" + def.name + "' has no column '" + f.column + "'");
  if (def.columns[*idx].type != ColumnType::kText) {
    spec_error("field '" + def.name + "." + f.column + "' is not a text column");
  }
  if (!(f.weight > 0.0) || !std::isfinite(f.weight)) {
    spec_error("field '" + def.name + "." + f.column + "' needs a positive weight");
  }
  return *idx;
}

}  // namespace

SearchIndex SearchIndex::build(const Store& store, const EntitySpec& spec) {
  if (!is_identifier(spec.name)) spec_error("name '" + spec.name + "' is not an identifier");
  const Relation* root = store.find(spec.root);
  if (!root) spec_error("unknown root relation '" + spec.root + "'");
  const auto pk = root->def.primary_key_index();
  if (!pk) spec_error("root relation '" + spec.root + "' has no primary key");

  struct ResolvedPart {
    const Relation* relation;
    std::size_t root_col;
    std::vector<std::size_t> field_cols;
    // root join value -> part row positions, in part order
    std::map<Value, std::vector<std::size_t>, bool (*)(const Value&, const Value&)> rows{
        [](const Value& a, const Value& b) { return key_order(a, b) < 0; }};
  };

  std::vector<std::size_t> root_cols;
  std::vector<std::string> labels;
  for (const auto& f : spec.root_fields) {
    root_cols.push_back(require_text_column(root->def, f));
    labels.push_back(f.column);
  }
  std::vector<ResolvedPart> parts;
  for (const auto& p : spec.parts) {
    const Relation* rel = store.find(p.relation);
    if (!rel) spec_error("unknown part relation '" + p.relation + "'");
    const auto rc = root->def.column_index(p.root_column);
    if (!rc) spec_error("relation '" + spec.root + "' has no column '" + p.root_column + "'");
    const auto pc = rel->def.column_index(p.part_column);
    if (!pc) spec_error("relation '" + p.relation + "' has no column '" + p.part_column + "'");
    if (root->def.columns[*rc].type != rel->def.columns[*pc].type) {
      spec_error("join columns '" + p.root_column + "' and '" + p.part_column + "' differ in type");
    }
    ResolvedPart rp{rel, *rc, {}};
    for (const auto& f : p.fields) {
      rp.field_cols.push_back(require_text_column(rel->def, f));
      labels.push_back(p.relation + "." + f.column);
    }
    for (std::size_t r = 0; r < rel->tuples.size(); ++r) {
      const Value& key = rel->tuples[r][*pc];
      if (!key.is_null()) rp.rows[key].push_back(r);
    }
    parts.push_back(std::move(rp));
  }
  if (labels.empty()) spec_error("entity '" + spec.name + "' declares no fields");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) spec_error("duplicate field '" + labels[i] + "'");
    }
  }

  SearchIndex index;
  index.spec_ = spec;
  index.entities_.reserve(root->tuples.size());
  for (const auto& tuple : root->tuples) {
    Entity e;
    e.id = tuple[*pk];
    for (std::size_t i = 0; i < spec.root_fields.size(); ++i) {
      EntityField field{labels[i], spec.root, spec.root_fields[i].weight, {}};
      const Value& v = tuple[root_cols[i]];
      if (v.is_text()) field.segments.push_back(tokenize(v.as_text()));
      e.fields.push_back(std::move(field));
    }
    std::size_t label = spec.root_fields.size();
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const auto& rp = parts[p];
      const Value& key = tuple[rp.root_col];
      const std::vector<std::size_t>* rows = nullptr;
      if (!key.is_null()) {
        const auto it = rp.rows.find(key);
        if (it != rp.rows.end()) rows = &it->second;
      }
      for (std::size_t f = 0; f < rp.field_cols.size(); ++f) {
        EntityField field{labels[label++], rp.relation->def.name, spec.parts[p].fields[f].weight, {}};
        if (rows) {
          for (std::size_t r : *rows) {
            const Value& v = rp.relation->tuples[r][rp.field_cols[f]];
            if (v.is_text()) field.segments.push_back(tokenize(v.as_text()));
          }
        }
        e.fields.push_back(std::move(field));
      }
    }
    index.entities_.push_back(std::move(e));
  }

  index.forward_.resize(index.entities_.size());
  std::map<std::uint32_t, std::uint32_t> field_counts;
  std::map<std::uint32_t, std::uint32_t> entity_counts;
  for (std::size_t ei = 0; ei < index.entities_.size(); ++ei) {
    entity_counts.clear();
    const auto& entity = index.entities_[ei];
    for (std::size_t fi = 0; fi < entity.fields.size(); ++fi) {
      field_counts.clear();
      for (const auto& seg : entity.fields[fi].segments) {
        for (std::size_t t = 0; t < seg.size(); ++t) {
          ++field_counts[index.intern(seg[t], false)];
          if (t + 1 < seg.size()) ++field_counts[index.intern(seg[t] + ' ' + seg[t + 1], true)];
        }
      }
      for (const auto& [term, tf] : field_counts) {
        index.postings_[term].push_back(
            {static_cast<std::uint32_t>(ei), static_cast<std::uint32_t>(fi), tf});
        entity_counts[term] += tf;
      }
    }
    auto& fwd = index.forward_[ei];
    fwd.reserve(entity_counts.size());
    for (const auto& [term, tf] : entity_counts) {
      fwd.push_back({term, tf});
      ++index.document_frequency_[term];
    }
  }
  return index;
}

SearchResult truncate(SearchResult result, std::optional<std::size_t> limit) {
  if (limit && result.hits.size() > *limit) result.hits.resize(*limit);
  return result;
}

SearchResult search(const SearchIndex& index, std::vector<QueryTerm> query,
                    std::optional<std::size_t> limit) {
  if (query.empty()) throw Error(ErrorCode::kEmptyQuery, "query has no terms");
  std::vector<QueryTerm> distinct;
  for (auto& q : query) {
    if (q.tokens.empty() || q.tokens.size() > 2) {
      throw Error(ErrorCode::kBadQuery, "query terms must hold one or two words");
    }
    if (std::find(distinct.begin(), distinct.end(), q) == distinct.end()) distinct.push_back(std::move(q));
  }

  SearchResult result;
  result.query = distinct;
  std::vector<std::uint32_t> ids;
  for (const auto& q : distinct) {
    const auto id = index.term_id(q.text());
    if (!id) return result;
    ids.push_back(*id);
  }

  const std::size_t n = index.entity_count();
  const auto& entities = index.entities();
  std::vector<double> score(n, 0.0);
  std::vector<std::uint32_t> matched_terms(n, 0);
  std::vector<std::vector<bool>> matched_fields(n);
  for (std::size_t qi = 0; qi < ids.size(); ++qi) {
    for (const auto& p : index.postings(ids[qi])) {
      // Only entities that matched every earlier term can still qualify.
      if (matched_terms[p.entity] < qi) continue;
      if (matched_terms[p.entity] == qi) matched_terms[p.entity] = static_cast<std::uint32_t>(qi + 1);
      score[p.entity] += entities[p.entity].fields[p.field].weight * static_cast<double>(p.tf);
      auto& mf = matched_fields[p.entity];
      if (mf.empty()) mf.resize(entities[p.entity].fields.size(), false);
      mf[p.field] = true;
    }
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (matched_terms[e] != ids.size()) continue;
    SearchHit hit{entities[e].id, score[e], {}, e};
    for (std::size_t f = 0; f < matched_fields[e].size(); ++f) {
      if (matched_fields[e][f]) hit.fields.push_back(entities[e].fields[f].label);
    }
    result.hits.push_back(std::move(hit));
  }
  std::sort(result.hits.begin(), result.hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return key_order(a.id, b.id) < 0;
  });
  result.total = result.hits.size();
  return truncate(std::move(result), limit);
}

}  // namespace flexcloud
